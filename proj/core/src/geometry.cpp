#include "polytube/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "polytube/convex.hpp"

namespace ptb {

bool ConvexPolytope::contains(const Vec& x, double slack) const {
    for (const auto& h : halfspaces)
        if (h.normal.dot(x) > h.offset + slack + tol) return false;
    return true;
}

double ConvexPolytope::diameter() const {
    double d = 0.0;
    for (size_t i = 0; i < vertices.size(); ++i)
        for (size_t j = i + 1; j < vertices.size(); ++j)
            d = std::max(d, (vertices[i] - vertices[j]).norm());
    return d;
}

double ConvexPolytope::inradius_at(const Vec& x) const {
    double s = std::numeric_limits<double>::infinity();
    for (const auto& h : halfspaces) s = std::min(s, h.offset - h.normal.dot(x));
    return s;
}

Vec ConvexPolytope::interior_point() const {
    Vec c = Vec::Zero(dim);
    for (const auto& v : vertices) c += v;
    return c / static_cast<double>(vertices.size());
}

std::vector<Vec> ConvexPolytope::facet_vertices(int f) const {
    std::vector<Vec> out;
    for (int id : facets[f].vertex_ids) out.push_back(vertices[id]);
    return out;
}

std::vector<Vec> ConvexPolytope::skeleton_vertices(int s) const {
    std::vector<Vec> out;
    for (int id : skeleton[s].vertex_ids) out.push_back(vertices[id]);
    return out;
}

namespace {

int affine_rank(const std::vector<Vec>& pts, double tol) {
    if (pts.size() < 2) return 0;
    Mat B(pts[0].size(), pts.size() - 1);
    for (size_t j = 1; j < pts.size(); ++j) B.col(j - 1) = pts[j] - pts[0];
    Eigen::JacobiSVD<Mat> svd(B);
    int r = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()[i] > tol * std::max(1.0, svd.singularValues()[0]))
            ++r;
    return r;
}

void vertex_subsets(const std::vector<Halfspace>& hs, int n,
                    std::vector<int>& idx, size_t start, double tol,
                    std::vector<Vec>& out) {
    if (static_cast<int>(idx.size()) == n) {
        Mat A(n, n);
        Vec b(n);
        for (int i = 0; i < n; ++i) {
            A.row(i) = hs[idx[i]].normal.transpose();
            b[i] = hs[idx[i]].offset;
        }
        Eigen::FullPivLU<Mat> lu(A);
        if (!lu.isInvertible()) return;
        Vec x = lu.solve(b);
        if (x.norm() > 1e12) return;
        for (const auto& h : hs)
            if (h.normal.dot(x) > h.offset + tol * std::max(1.0, x.norm())) return;
        out.push_back(x);
        return;
    }
    for (size_t i = start; idx.size() + (hs.size() - i) >= static_cast<size_t>(n) &&
                           i < hs.size();
         ++i) {
        idx.push_back(static_cast<int>(i));
        vertex_subsets(hs, n, idx, i + 1, tol, out);
        idx.pop_back();
    }
}

// 0 strictly inside conv(normals) <=> every direction is blocked, i.e. the
// polytope has no recession direction.
bool normals_surround_origin(const std::vector<Halfspace>& hs, int n) {
    std::vector<Vec> normals;
    for (const auto& h : hs) normals.push_back(h.normal);
    Mat B(n, normals.size());
    for (size_t j = 0; j < normals.size(); ++j) B.col(j) = normals[j];
    Eigen::JacobiSVD<Mat> svd(B);
    if (svd.rank() < n) return false;
    if (point_to_hull_distance(Vec::Zero(n), normals) > 1e-9) return false;
    // margin check on a deterministic direction set
    std::vector<Vec> dirs;
    for (int i = 0; i < n; ++i) {
        Vec e = Vec::Zero(n);
        e[i] = 1.0;
        dirs.push_back(e);
        dirs.push_back(-e);
    }
    std::mt19937 rng(12345);
    std::normal_distribution<double> g;
    for (int k = 0; k < 512; ++k) {
        Vec d(n);
        for (int i = 0; i < n; ++i) d[i] = g(rng);
        if (d.norm() < 1e-12) continue;
        dirs.push_back(d.normalized());
    }
    for (const auto& d : dirs) {
        double m = -std::numeric_limits<double>::infinity();
        for (const auto& h : hs) m = std::max(m, h.normal.dot(d));
        if (m < 1e-7) return false;
    }
    return true;
}

}  // namespace

ConvexPolytope build_polytope(const std::vector<Halfspace>& halfspaces,
                              double tol, const std::string& name) {
    if (halfspaces.empty()) throw DegeneratePolytope("no halfspaces");
    const int n = static_cast<int>(halfspaces[0].normal.size());
    if (n < 2) throw DegeneratePolytope("dimension must be >= 2");
    for (const auto& h : halfspaces) {
        if (static_cast<int>(h.normal.size()) != n)
            throw DegeneratePolytope("inconsistent dimensions");
        if (std::abs(h.normal.norm() - 1.0) > 1e-6)
            throw NonUnitNormal("halfspace normal is not unit length");
    }
    if (!normals_surround_origin(halfspaces, n))
        throw UnboundedPolytope("halfspaces do not bound a polytope");

    ConvexPolytope P;
    P.dim = n;
    P.name = name;
    P.tol = tol;
    P.halfspaces = halfspaces;

    std::vector<Vec> raw;
    std::vector<int> idx;
    vertex_subsets(halfspaces, n, idx, 0, std::max(tol, 1e-9), raw);
    for (const auto& v : raw) {
        bool dup = false;
        for (const auto& w : P.vertices)
            if ((v - w).norm() < 1e-8) {
                dup = true;
                break;
            }
        if (!dup) P.vertices.push_back(v);
    }
    if (P.vertices.size() < static_cast<size_t>(n + 1))
        throw DegeneratePolytope("fewer than dim+1 vertices");

    // interior must be nonempty
    Vec c = P.interior_point();
    if (P.inradius_at(c) < 1e-9)
        throw DegeneratePolytope("empty interior");

    // facets + removal of redundant halfspaces
    std::vector<Halfspace> kept;
    for (size_t hi = 0; hi < P.halfspaces.size(); ++hi) {
        const auto& h = P.halfspaces[hi];
        Facet f;
        for (size_t vi = 0; vi < P.vertices.size(); ++vi)
            if (near(h.normal.dot(P.vertices[vi]), h.offset, 1e-8))
                f.vertex_ids.push_back(static_cast<int>(vi));
        if (f.vertex_ids.size() < static_cast<size_t>(n)) continue;
        std::vector<Vec> fverts;
        for (int id : f.vertex_ids) fverts.push_back(P.vertices[id]);
        if (affine_rank(fverts, 1e-8) != n - 1) continue;
        f.halfspace = static_cast<int>(kept.size());
        kept.push_back(h);
        P.facets.push_back(std::move(f));
    }
    P.halfspaces = std::move(kept);
    if (P.facets.size() < static_cast<size_t>(n + 1))
        throw DegeneratePolytope("not enough facets");

    for (auto& f : P.facets)
        std::sort(f.vertex_ids.begin(), f.vertex_ids.end());

    // (n-2)-skeleton: common vertex sets of facet pairs with affine rank n-2
    std::set<std::vector<int>> seen;
    for (size_t a = 0; a < P.facets.size(); ++a) {
        for (size_t b = a + 1; b < P.facets.size(); ++b) {
            std::vector<int> common;
            std::set_intersection(P.facets[a].vertex_ids.begin(),
                                  P.facets[a].vertex_ids.end(),
                                  P.facets[b].vertex_ids.begin(),
                                  P.facets[b].vertex_ids.end(),
                                  std::back_inserter(common));
            if (common.empty()) continue;
            std::vector<Vec> pts;
            for (int id : common) pts.push_back(P.vertices[id]);
            if (affine_rank(pts, 1e-8) != n - 2) continue;
            if (!seen.insert(common).second) continue;
            SkeletonFace sf;
            sf.dim = n - 2;
            sf.vertex_ids = common;
            P.skeleton.push_back(std::move(sf));
        }
    }
    return P;
}

double distance_to_skeleton(const ConvexPolytope& P, const Vec& x) {
    if (!P.contains(x, 1e-7)) throw PointOutside("point outside the polytope");
    double d = std::numeric_limits<double>::infinity();
    for (size_t s = 0; s < P.skeleton.size(); ++s)
        d = std::min(d, point_to_hull_distance(x, P.skeleton_vertices(
                                                       static_cast<int>(s))));
    return d;
}

double segment_skeleton_clearance(const ConvexPolytope& P, const Vec& a,
                                  const Vec& b) {
    double d = std::numeric_limits<double>::infinity();
    for (size_t s = 0; s < P.skeleton.size(); ++s)
        d = std::min(d, segment_to_hull_distance(
                            a, b, P.skeleton_vertices(static_cast<int>(s))));
    return d;
}

namespace {

struct MatKey {
    long long q[16];
    int n;
    bool operator<(const MatKey& o) const {
        if (n != o.n) return n < o.n;
        for (int i = 0; i < n * n; ++i)
            if (q[i] != o.q[i]) return q[i] < o.q[i];
        return false;
    }
};

MatKey quantize(const Mat& m, double cell) {
    MatKey k{};
    k.n = static_cast<int>(m.rows());
    int t = 0;
    // grid shifted by an irrational fraction of a cell so that the algebraic
    // entries of reflection groups never sit on a cell boundary
    for (int i = 0; i < k.n; ++i)
        for (int j = 0; j < k.n; ++j)
            k.q[t++] = llround((m(i, j) + 0.37193 * cell) / cell);
    return k;
}

}  // namespace

RationalityResult classify_rationality(const ConvexPolytope& P, long max_group,
                                       double tol) {
    std::vector<Mat> gens;
    for (const auto& h : P.halfspaces) {
        Mat r = Mat::Identity(P.dim, P.dim) -
                2.0 * h.normal * h.normal.transpose();
        bool dup = false;
        for (const auto& g : gens)
            if ((g - r).norm() < tol) {
                dup = true;
                break;
            }
        if (!dup) gens.push_back(r);
    }

    const double cell = std::max(100.0 * tol, 1e-6);
    std::vector<Mat> elems;
    std::multimap<MatKey, int> table;
    auto find = [&](const Mat& m) -> int {
        auto range = table.equal_range(quantize(m, cell));
        for (auto it = range.first; it != range.second; ++it)
            if ((elems[it->second] - m).norm() < tol) return it->second;
        return -1;
    };
    auto insert = [&](const Mat& m) {
        elems.push_back(m);
        table.emplace(quantize(m, cell), static_cast<int>(elems.size()) - 1);
    };

    insert(Mat::Identity(P.dim, P.dim));
    size_t head = 0;
    while (head < elems.size()) {
        Mat base = elems[head++];
        for (const auto& g : gens) {
            Mat prod = g * base;
            if (find(prod) >= 0) continue;
            if (static_cast<long>(elems.size()) >= max_group)
                return {false, 0, max_group};
            insert(prod);
        }
    }
    return {true, static_cast<long>(elems.size()), max_group};
}

// --- stock tables -------------------------------------------------------------

ConvexPolytope make_box(const std::vector<double>& sides) {
    const int n = static_cast<int>(sides.size());
    std::vector<Halfspace> hs;
    for (int i = 0; i < n; ++i) {
        Vec e = Vec::Zero(n);
        e[i] = 1.0;
        hs.push_back({e, sides[i]});
        hs.push_back({-e, 0.0});
    }
    return build_polytope(hs, kDefaultTol, "box");
}

ConvexPolytope make_regular_tetrahedron() {
    std::vector<Vec> verts;
    double signs[4][3] = {{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
    for (auto& s : signs) {
        Vec v(3);
        v << s[0], s[1], s[2];
        verts.push_back(v);
    }
    std::vector<Halfspace> hs;
    for (const auto& v : verts) {
        Vec n = (-v).normalized();  // face opposite each vertex
        hs.push_back({n, 1.0 / std::sqrt(3.0)});
    }
    return build_polytope(hs, kDefaultTol, "regular-tetrahedron");
}

ConvexPolytope make_equilateral_triangle(double side) {
    // vertices (0,0), (side,0), (side/2, side*sqrt(3)/2)
    const double h = side * std::sqrt(3.0) / 2.0;
    std::vector<Halfspace> hs;
    Vec n1(2), n2(2), n3(2);
    n1 << 0.0, -1.0;                      // bottom
    n2 << std::sqrt(3.0) / 2.0, 0.5;      // right
    n3 << -std::sqrt(3.0) / 2.0, 0.5;     // left
    hs.push_back({n1, 0.0});
    hs.push_back({n2, std::sqrt(3.0) / 2.0 * side});
    hs.push_back({n3, 0.0});
    (void)h;
    return build_polytope(hs, kDefaultTol, "equilateral-triangle");
}

ConvexPolytope make_triangle_prism(double side, double height) {
    std::vector<Halfspace> hs;
    Vec n1(3), n2(3), n3(3), nt(3), nb(3);
    n1 << 0.0, -1.0, 0.0;
    n2 << std::sqrt(3.0) / 2.0, 0.5, 0.0;
    n3 << -std::sqrt(3.0) / 2.0, 0.5, 0.0;
    nt << 0.0, 0.0, 1.0;
    nb << 0.0, 0.0, -1.0;
    hs.push_back({n1, 0.0});
    hs.push_back({n2, std::sqrt(3.0) / 2.0 * side});
    hs.push_back({n3, 0.0});
    hs.push_back({nt, height});
    hs.push_back({nb, 0.0});
    return build_polytope(hs, kDefaultTol, "triangle-prism");
}

ConvexPolytope make_irrational_triangle() {
    // angle arccos(1/3) between the two edges meeting at the origin
    const double a = std::acos(1.0 / 3.0);
    Vec e1(2), e2(2);
    e1 << 1.0, 0.0;
    e2 << std::cos(a), std::sin(a);
    // triangle (0,0), e1*2, e2*2
    Vec p0 = Vec::Zero(2), p1 = 2.0 * e1, p2 = 2.0 * e2;
    auto edge_normal = [&](const Vec& u, const Vec& v, const Vec& inside) {
        Vec d = v - u;
        Vec n(2);
        n << d[1], -d[0];
        n.normalize();
        if (n.dot(inside - u) > 0) n = -n;
        return n;
    };
    Vec c = (p0 + p1 + p2) / 3.0;
    std::vector<Halfspace> hs;
    Vec n01 = edge_normal(p0, p1, c);
    Vec n12 = edge_normal(p1, p2, c);
    Vec n20 = edge_normal(p2, p0, c);
    hs.push_back({n01, n01.dot(p0)});
    hs.push_back({n12, n12.dot(p1)});
    hs.push_back({n20, n20.dot(p2)});
    return build_polytope(hs, kDefaultTol, "irrational-triangle");
}

double ConvexPolytope::volume() const {
    if (dim == 2) {
        // shoelace over the hull of the vertices
        std::vector<Vec2> pts;
        for (const auto& v : vertices) pts.emplace_back(v[0], v[1]);
        return std::abs(convex_hull(pts).area());
    }
    if (dim == 3) {
        // cone decomposition from an interior point over facet fans
        Eigen::Vector3d c = interior_point();
        double vol = 0.0;
        for (size_t f = 0; f < facets.size(); ++f) {
            auto raw = facet_vertices(static_cast<int>(f));
            std::vector<Eigen::Vector3d> fv(raw.begin(), raw.end());
            Eigen::Vector3d fc = Eigen::Vector3d::Zero();
            for (const auto& v : fv) fc += v;
            fc /= static_cast<double>(fv.size());
            Eigen::Vector3d n = halfspaces[facets[f].halfspace].normal;
            Eigen::Vector3d u = (fv[0] - fc).normalized();
            Eigen::Vector3d w = n.cross(u);
            std::sort(fv.begin(), fv.end(),
                      [&](const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
                          return std::atan2(w.dot(a - fc), u.dot(a - fc)) <
                                 std::atan2(w.dot(b - fc), u.dot(b - fc));
                      });
            for (size_t i = 0; i < fv.size(); ++i) {
                const Eigen::Vector3d& p = fv[i];
                const Eigen::Vector3d& q = fv[(i + 1) % fv.size()];
                vol += std::abs((p - c).dot((q - c).cross(fc - c))) / 6.0;
            }
        }
        return vol;
    }
    throw Error("volume implemented for dim <= 3");
}

}  // namespace ptb
