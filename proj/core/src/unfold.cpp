#include "polytube/unfold.hpp"

namespace ptb {

AffineMap affine_reflection(const Vec& n, double d) {
    const auto dim = n.size();
    Mat lin = Mat::Identity(dim, dim) - 2.0 * n * n.transpose();
    Vec trans = 2.0 * d * n;
    return {lin, trans};
}

UnfoldingChain unfold(const ConvexPolytope& P, const std::vector<int>& word) {
    if (word.empty()) throw Error("unfold needs a non-empty word");
    for (int w : word)
        if (w < 0 || w >= static_cast<int>(P.halfspaces.size()))
            throw Error("word letter is not a facet index");

    UnfoldingChain chain;
    chain.word = word;
    chain.copies.push_back(AffineMap::identity(P.dim));
    for (int letter : word) {
        const AffineMap& A = chain.copies.back();
        const auto& h = P.halfspaces[letter];
        // image of the facet hyperplane under A; renormalizing keeps the
        // reflections orthogonal, otherwise drift compounds along the chain
        Vec n = A.linear * h.normal;
        double d = h.offset + n.dot(A.translation);
        double len = n.norm();
        n /= len;
        d /= len;
        chain.mirrors.push_back({n, d});
        chain.copies.push_back(affine_reflection(n, d).compose(A));
    }
    chain.composed = chain.copies.back();
    return chain;
}

Vec fold_ray_point(const ConvexPolytope& P, const UnfoldingChain& chain,
                   const Vec& origin, const Vec& dir, double t,
                   int* copy_index) {
    size_t j = 0;
    for (; j < chain.mirrors.size(); ++j) {
        const auto& m = chain.mirrors[j];
        double vn = m.normal.dot(dir);
        if (std::abs(vn) < 1e-14) break;  // ray parallel to a mirror
        double cross = (m.offset - m.normal.dot(origin)) / vn;
        if (t < cross) break;
    }
    if (copy_index) *copy_index = static_cast<int>(j);
    return chain.copies[j].inverse().apply(origin + t * dir);
}

Vec fold_point(const ConvexPolytope& P, const UnfoldingChain& chain,
               const Vec& corridor_point, int* copy_index) {
    double best_slack = -std::numeric_limits<double>::infinity();
    Vec best = corridor_point;
    int best_j = 0;
    for (size_t j = 0; j < chain.copies.size(); ++j) {
        Vec x = chain.copies[j].inverse().apply(corridor_point);
        double slack = P.inradius_at(x);
        if (slack > best_slack) {
            best_slack = slack;
            best = x;
            best_j = static_cast<int>(j);
        }
    }
    if (copy_index) *copy_index = best_j;
    return best;
}

}  // namespace ptb
