#ifndef POLYTUBE_UNFOLD_HPP
#define POLYTUBE_UNFOLD_HPP

#include <vector>

#include "polytube/flow.hpp"

namespace ptb {

struct AffineMap {
    Mat linear;
    Vec translation;

    Vec apply(const Vec& x) const { return linear * x + translation; }
    Vec apply_dir(const Vec& d) const { return linear * d; }
    AffineMap inverse() const {
        Mat li = linear.transpose();  // orthogonal linear parts only
        return {li, -(li * translation)};
    }
    static AffineMap identity(int n) {
        return {Mat::Identity(n, n), Vec::Zero(n)};
    }
    AffineMap compose(const AffineMap& inner) const {
        return {linear * inner.linear, linear * inner.translation + translation};
    }
};

// Affine reflection in the hyperplane { x : n.x = d }.
AffineMap affine_reflection(const Vec& n, double d);

struct UnfoldingChain {
    std::vector<int> word;
    // copies[j] maps table coordinates to the j-th corridor copy;
    // copies[0] = identity, size = word length + 1
    std::vector<AffineMap> copies;
    // reflection hyperplane of step j, in corridor coordinates
    std::vector<Halfspace> mirrors;
    AffineMap composed;            // copies.back()

    const Mat& linear_part() const { return composed.linear; }
    const Vec& translation() const { return composed.translation; }
};

// Builds the corridor for the word: copy j+1 reflects copy j in (the image
// of) the facet named by the j-th letter.
UnfoldingChain unfold(const ConvexPolytope& P, const std::vector<int>& word);

// Folds the corridor point origin + t*dir back to the table. The copy is the
// one selected by the ray's crossing order through the chain mirrors.
Vec fold_ray_point(const ConvexPolytope& P, const UnfoldingChain& chain,
                   const Vec& origin, const Vec& dir, double t,
                   int* copy_index = nullptr);

// Folds a corridor point back to the table: picks the copy whose preimage is
// deepest inside P. Ambiguous when corridor copies overlap; prefer
// fold_ray_point when the axial parameter is known.
Vec fold_point(const ConvexPolytope& P, const UnfoldingChain& chain,
               const Vec& corridor_point, int* copy_index = nullptr);

}  // namespace ptb

#endif
