#include "ctstreak/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ctstreak {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double clamp01(double v) { return std::max(0.0, std::min(1.0, v)); }

/// Angular offset of `a` above `base`, in [0, 2pi).
double angle_from(double base, double a) {
    double d = std::fmod(a - base, kTwoPi);
    if (d < 0) d += kTwoPi;
    return d;
}

bool angle_in_range(double a, double start, double extent, double tol) {
    double d = angle_from(start, a);
    if (d <= extent + tol) return true;
    return kTwoPi - d <= tol;  // wrap: just below start
}

}  // namespace

double wrap_angle(double a) {
    double w = std::remainder(a, kTwoPi);  // (-pi, pi] up to the boundary
    if (w <= -kPi) w += kTwoPi;
    return w;
}

double DiskSector::extent() const {
    double e = std::fmod(angle_end - angle_start, kTwoPi);
    if (e <= 0) e += kTwoPi;
    return e;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

void validate_shape(const Shape& shape) {
    std::visit(
        [](const auto& sh) {
            using T = std::decay_t<decltype(sh)>;
            if constexpr (std::is_same_v<T, Disk>) {
                if (!(sh.radius > 0))
                    throw std::invalid_argument("disk radius must be positive");
            } else if constexpr (std::is_same_v<T, EllipseShape>) {
                if (!(sh.rx > 0) || !(sh.ry > 0))
                    throw std::invalid_argument("ellipse semi-axes must be positive");
            } else if constexpr (std::is_same_v<T, ConvexPolygon>) {
                const auto& v = sh.vertices;
                const size_t n = v.size();
                if (n < 3) throw std::invalid_argument("polygon needs at least 3 vertices");
                double scale = 0.0;
                for (const auto& p : v) scale = std::max(scale, std::max(std::abs(p.x), std::abs(p.y)));
                const double tol = 1e-12 * std::max(scale, 1.0);
                for (size_t i = 0; i < n; ++i) {
                    Vec2 a = v[i], b = v[(i + 1) % n], c = v[(i + 2) % n];
                    double cr = cross(b - a, c - b);
                    if (cr < tol * tol)  // area-scaled: require strict left turns
                        throw std::invalid_argument(
                            "polygon must be strictly convex and counterclockwise");
                }
            } else if constexpr (std::is_same_v<T, DiskSector>) {
                if (!(sh.radius > 0))
                    throw std::invalid_argument("sector radius must be positive");
                double e = sh.extent();
                if (!(e > 0) || !(e < kTwoPi))
                    throw std::invalid_argument("sector extent must lie in (0, 2pi)");
            }
        },
        shape);
}

// ---------------------------------------------------------------------------
// Membership
// ---------------------------------------------------------------------------

bool contains(const Shape& shape, Vec2 p) {
    return std::visit(
        [p](const auto& sh) -> bool {
            using T = std::decay_t<decltype(sh)>;
            if constexpr (std::is_same_v<T, Disk>) {
                Vec2 u = p - sh.center;
                return dot(u, u) <= sh.radius * sh.radius;
            } else if constexpr (std::is_same_v<T, EllipseShape>) {
                Vec2 u = rotated(p - sh.center, -sh.angle);
                double q = (u.x / sh.rx) * (u.x / sh.rx) + (u.y / sh.ry) * (u.y / sh.ry);
                return q <= 1.0;
            } else if constexpr (std::is_same_v<T, ConvexPolygon>) {
                const auto& v = sh.vertices;
                for (size_t i = 0; i < v.size(); ++i) {
                    Vec2 a = v[i], b = v[(i + 1) % v.size()];
                    if (cross(b - a, p - a) < 0) return false;
                }
                return true;
            } else if constexpr (std::is_same_v<T, DiskSector>) {
                Vec2 u = p - sh.center;
                double r2 = dot(u, u);
                if (r2 > sh.radius * sh.radius) return false;
                if (r2 == 0.0) return true;  // the center vertex
                return angle_in_range(std::atan2(u.y, u.x), sh.angle_start, sh.extent(), 0.0);
            }
        },
        shape);
}

bool contains(const Primitive& prim, Vec2 p) { return contains(prim.shape, p); }

namespace {

/// Strict interior test with a boundary margin: true only if p is at least
/// `margin` inside the shape.  Used to discard tangency events swallowed by
/// an overlapping primitive without eating shared-boundary contacts.
bool contains_strict(const Shape& shape, Vec2 p, double margin) {
    return std::visit(
        [p, margin](const auto& sh) -> bool {
            using T = std::decay_t<decltype(sh)>;
            if constexpr (std::is_same_v<T, Disk>) {
                return norm(p - sh.center) < sh.radius - margin;
            } else if constexpr (std::is_same_v<T, EllipseShape>) {
                Vec2 u = rotated(p - sh.center, -sh.angle);
                // margin relative to the smaller axis bounds the true distance
                double m = margin / std::min(sh.rx, sh.ry);
                double q = std::sqrt((u.x / sh.rx) * (u.x / sh.rx) + (u.y / sh.ry) * (u.y / sh.ry));
                return q < 1.0 - m;
            } else if constexpr (std::is_same_v<T, ConvexPolygon>) {
                const auto& v = sh.vertices;
                for (size_t i = 0; i < v.size(); ++i) {
                    Vec2 a = v[i], b = v[(i + 1) % v.size()];
                    Vec2 e = b - a;
                    double len = norm(e);
                    if (cross(e, p - a) < margin * len) return false;
                }
                return true;
            } else if constexpr (std::is_same_v<T, DiskSector>) {
                Vec2 u = p - sh.center;
                double r = norm(u);
                if (r >= sh.radius - margin) return false;
                if (r <= margin) return sh.extent() >= kPi;  // near center: reflex only
                double ang_margin = margin / r;
                double d = angle_from(sh.angle_start, std::atan2(u.y, u.x));
                return d > ang_margin && d < sh.extent() - ang_margin;
            }
        },
        shape);
}

}  // namespace

double support_radius(const Shape& shape) {
    return std::visit(
        [](const auto& sh) -> double {
            using T = std::decay_t<decltype(sh)>;
            if constexpr (std::is_same_v<T, Disk>) {
                return norm(sh.center) + sh.radius;
            } else if constexpr (std::is_same_v<T, EllipseShape>) {
                return norm(sh.center) + std::max(sh.rx, sh.ry);
            } else if constexpr (std::is_same_v<T, ConvexPolygon>) {
                double r = 0.0;
                for (const auto& v : sh.vertices) r = std::max(r, norm(v));
                return r;
            } else if constexpr (std::is_same_v<T, DiskSector>) {
                return norm(sh.center) + sh.radius;
            }
        },
        shape);
}

Shape rotated(const Shape& shape, double angle) {
    return std::visit(
        [angle](const auto& sh) -> Shape {
            using T = std::decay_t<decltype(sh)>;
            if constexpr (std::is_same_v<T, Disk>) {
                return Disk{rotated(sh.center, angle), sh.radius};
            } else if constexpr (std::is_same_v<T, EllipseShape>) {
                return EllipseShape{rotated(sh.center, angle), sh.rx, sh.ry, sh.angle + angle};
            } else if constexpr (std::is_same_v<T, ConvexPolygon>) {
                ConvexPolygon out;
                out.vertices.reserve(sh.vertices.size());
                for (const auto& v : sh.vertices) out.vertices.push_back(rotated(v, angle));
                return out;
            } else if constexpr (std::is_same_v<T, DiskSector>) {
                return DiskSector{rotated(sh.center, angle), sh.radius,
                                  sh.angle_start + angle, sh.angle_end + angle};
            }
        },
        shape);
}

// ---------------------------------------------------------------------------
// Phantom
// ---------------------------------------------------------------------------

bool Phantom::has_metal() const {
    for (const auto& m : metals)
        if (!m.primitives.empty()) return true;
    return false;
}

std::vector<Primitive> Phantom::metal_primitives() const {
    std::vector<Primitive> out;
    for (const auto& m : metals)
        out.insert(out.end(), m.primitives.begin(), m.primitives.end());
    return out;
}

std::vector<std::pair<Primitive, double>> Phantom::metal_primitives_alpha() const {
    std::vector<std::pair<Primitive, double>> out;
    for (const auto& m : metals)
        for (size_t i = 0; i < m.primitives.size(); ++i)
            out.emplace_back(m.primitives[i], m.alpha[i]);
    return out;
}

void validate_phantom(const Phantom& phantom) {
    if (!(phantom.fov > 0)) throw std::invalid_argument("phantom fov must be positive");
    for (const auto& p : phantom.background) validate_shape(p.shape);
    for (const auto& m : phantom.metals) {
        if (m.primitives.size() != m.alpha.size())
            throw std::invalid_argument("metal region '" + m.label +
                                        "': one alpha per primitive required");
        for (const auto& p : m.primitives) validate_shape(p.shape);
        for (double a : m.alpha)
            if (!(a < 0))
                throw std::invalid_argument("metal region '" + m.label +
                                            "': spectral slope alpha must be negative");
    }
    const double bound = phantom.fov * std::sqrt(2.0) * (1 + 1e-12);
    auto check_inside = [&](const Primitive& p) {
        if (support_radius(p.shape) > bound)
            throw std::invalid_argument("primitive extends outside the field of view");
    };
    for (const auto& p : phantom.background) check_inside(p);
    for (const auto& m : phantom.metals)
        for (const auto& p : m.primitives) check_inside(p);
    if (phantom.hull_index >= static_cast<int>(phantom.background.size()))
        throw std::invalid_argument("hull index out of range");
}

double attenuation_at(const Phantom& phantom, Vec2 p) {
    double f = 0.0;
    for (const auto& prim : phantom.background)
        if (contains(prim, p)) f += prim.value;
    for (const auto& m : phantom.metals)
        for (const auto& prim : m.primitives)
            if (contains(prim, p)) f += prim.value;
    return f;
}

double attenuation_at(const Phantom& phantom, Vec2 p, double energy, double e0) {
    double f = attenuation_at(phantom, p);
    const double de = energy - e0;
    for (const auto& m : phantom.metals)
        for (size_t i = 0; i < m.primitives.size(); ++i)
            if (contains(m.primitives[i], p)) f += m.alpha[i] * de;
    return f;
}

ContrastCheck metal_contrast_check(const Phantom& phantom, int n) {
    ContrastCheck out;
    double min_in = std::numeric_limits<double>::infinity();
    double max_out = 0.0;
    const auto metals = phantom.metal_primitives();
    const double pitch = 2.0 * phantom.fov / n;
    for (int iy = 0; iy < n; ++iy) {
        for (int ix = 0; ix < n; ++ix) {
            Vec2 p{-phantom.fov + (ix + 0.5) * pitch, -phantom.fov + (iy + 0.5) * pitch};
            bool inside = false;
            for (const auto& m : metals)
                if (contains(m, p)) { inside = true; break; }
            double f = attenuation_at(phantom, p);
            if (inside)
                min_in = std::min(min_in, f);
            else
                max_out = std::max(max_out, f);
        }
    }
    if (!std::isfinite(min_in)) min_in = 0.0;  // no metal sampled
    out.min_inside_metal = min_in;
    out.max_outside_metal = max_out;
    out.ratio = max_out > 0 ? min_in / max_out : std::numeric_limits<double>::infinity();
    out.holds = out.ratio > 1.0;
    return out;
}

// ---------------------------------------------------------------------------
// Lines
// ---------------------------------------------------------------------------

std::pair<double, double> canonical_line(double phi, double s) {
    double p = wrap_angle(phi);
    if (p < 0) {
        p += kPi;
        s = -s;
    } else if (p >= kPi) {  // wrap_angle returns (-pi, pi]; p == pi maps to 0
        p -= kPi;
        s = -s;
    }
    return {p, s};
}

bool same_line(double phi1, double s1, double phi2, double s2, double tol_phi, double tol_s) {
    auto [p1, t1] = canonical_line(phi1, s1);
    auto [p2, t2] = canonical_line(phi2, s2);
    // compare p2 in {p2, p2 - pi, p2 + pi} against p1 to handle the seam
    for (int k = -1; k <= 1; ++k) {
        double p = p2 + k * kPi;
        double s = (k == 0) ? t2 : -t2;
        if (std::abs(p - p1) < tol_phi && std::abs(s - s1) < tol_s) return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Tangency machinery
// ---------------------------------------------------------------------------

namespace {

/// A smooth boundary piece in support-function form: a full circle/ellipse or
/// a circular arc restricted to an angular range.
struct SmoothPiece {
    Vec2 center;
    double rx = 0.0, ry = 0.0, angle = 0.0;  // rx == ry: circle
    bool is_arc = false;                     // restrict to [arc_start, +extent]
    double arc_start = 0.0, arc_extent = 0.0;
    int primitive = -1;

    bool is_circle() const { return rx == ry && angle == 0.0; }

    /// Support radius r(phi): half-width of the shape along theta(phi).
    double support(double phi) const {
        const double c = std::cos(phi - angle), s = std::sin(phi - angle);
        return std::sqrt(rx * rx * c * c + ry * ry * s * s);
    }

    /// Boundary point whose outward normal is sign * theta(phi).
    Vec2 tangent_point(double phi, int sign) const {
        const double re = support(phi);
        const double lambda = sign * rx * ry / re;
        const double cu = lambda * std::cos(phi - angle) / ry;
        const double su = lambda * std::sin(phi - angle) / rx;
        Vec2 local{rx * cu, ry * su};
        return center + rotated(local, angle);
    }

    /// For arcs: is the boundary point at polar angle `a` on the arc?
    bool on_arc(Vec2 p, double tol_len) const {
        if (!is_arc) return true;
        Vec2 u = p - center;
        double r = norm(u);
        if (r <= 0) return false;
        return angle_in_range(std::atan2(u.y, u.x), arc_start, arc_extent, tol_len / r);
    }
};

/// A vertex of the union boundary with its fan of admissible outward normal
/// directions: the closed cone sweeping counterclockwise from `normal_a` to
/// `normal_b`.  `full_fan` marks reflex corners (every direction admissible).
struct VertexFan {
    Vec2 point;
    Vec2 normal_a;
    Vec2 normal_b;
    bool full_fan = false;
    int primitive = -1;

    bool admits(Vec2 theta, double tol) const {
        if (full_fan) return true;
        auto in_cone = [&](Vec2 d) {
            return cross(normal_a, d) >= -tol && cross(d, normal_b) >= -tol &&
                   (dot(d, normal_a) > -tol || dot(d, normal_b) > -tol);
        };
        return in_cone(theta) || in_cone(-1.0 * theta);
    }
};

/// A straight boundary edge from a to b.
struct StraightEdge {
    Vec2 a, b;
    int primitive = -1;
};

struct BoundaryFeatures {
    std::vector<SmoothPiece> smooth;
    std::vector<StraightEdge> edges;
    std::vector<VertexFan> vertices;
};

Vec2 outward_edge_normal(Vec2 a, Vec2 b) {
    // region lies to the left of a->b (counterclockwise boundary)
    Vec2 e = b - a;
    double len = norm(e);
    return {e.y / len, -e.x / len};
}

BoundaryFeatures collect_features(const std::vector<Primitive>& primitives) {
    BoundaryFeatures out;
    for (size_t idx = 0; idx < primitives.size(); ++idx) {
        const int pi = static_cast<int>(idx);
        std::visit(
            [&](const auto& sh) {
                using T = std::decay_t<decltype(sh)>;
                if constexpr (std::is_same_v<T, Disk>) {
                    out.smooth.push_back({sh.center, sh.radius, sh.radius, 0.0,
                                          false, 0.0, 0.0, pi});
                } else if constexpr (std::is_same_v<T, EllipseShape>) {
                    out.smooth.push_back({sh.center, sh.rx, sh.ry, sh.angle,
                                          false, 0.0, 0.0, pi});
                } else if constexpr (std::is_same_v<T, ConvexPolygon>) {
                    const auto& v = sh.vertices;
                    const size_t n = v.size();
                    for (size_t i = 0; i < n; ++i)
                        out.edges.push_back({v[i], v[(i + 1) % n], pi});
                    for (size_t i = 0; i < n; ++i) {
                        Vec2 prev = v[(i + n - 1) % n];
                        Vec2 next = v[(i + 1) % n];
                        out.vertices.push_back({v[i], outward_edge_normal(prev, v[i]),
                                                outward_edge_normal(v[i], next), false, pi});
                    }
                } else if constexpr (std::is_same_v<T, DiskSector>) {
                    const double a0 = sh.angle_start;
                    const double ext = sh.extent();
                    const double a1 = a0 + ext;
                    const Vec2 corner0 = sh.center + sh.radius * unit_vec(a0);
                    const Vec2 corner1 = sh.center + sh.radius * unit_vec(a1);
                    out.smooth.push_back({sh.center, sh.radius, sh.radius, 0.0,
                                          true, a0, ext, pi});
                    // boundary traversed counterclockwise: center -> corner0,
                    // arc, corner1 -> center
                    out.edges.push_back({sh.center, corner0, pi});
                    out.edges.push_back({corner1, sh.center, pi});
                    // outer corners: edge normal then arc normal (ccw order)
                    out.vertices.push_back({corner0, unit_vec(a0 - kPi / 2),
                                            unit_vec(a0), false, pi});
                    out.vertices.push_back({corner1, unit_vec(a1),
                                            unit_vec(a1 + kPi / 2), false, pi});
                    // center corner: exterior cone between the two edge
                    // normals; reflex (extent > pi) admits every direction
                    if (ext < kPi) {
                        out.vertices.push_back({sh.center, unit_vec(a1 + kPi / 2),
                                                unit_vec(a0 - kPi / 2), false, pi});
                    } else {
                        out.vertices.push_back({sh.center, {1, 0}, {1, 0}, true, pi});
                    }
                }
            },
            primitives[idx].shape);
    }
    return out;
}

}  // namespace

int span_dimension(const std::vector<TangencyEvent>& events, const GeometryTol& tol) {
    std::vector<double> ts;
    for (const auto& ev : events) {
        if (ev.ambiguous) continue;
        if (ev.kind == TangencyKind::EdgeSegment) {
            if (ev.t_hi - ev.t_lo > tol.dedup_s()) return 2;
            ts.push_back(0.5 * (ev.t_lo + ev.t_hi));
        } else {
            ts.push_back(ev.t);
        }
    }
    std::sort(ts.begin(), ts.end());
    for (size_t i = 1; i < ts.size(); ++i)
        if (ts[i] - ts[i - 1] > tol.dedup_s()) return 2;
    return ts.empty() ? 0 : 1;
}

std::vector<TangencyEvent> line_tangencies(const std::vector<Primitive>& primitives,
                                           double phi, double s,
                                           const GeometryTol& tol,
                                           int* discarded_interior) {
    const Vec2 theta = unit_vec(phi);
    const Vec2 theta_perp{-theta.y, theta.x};
    const double eps = tol.tangency();
    const double eps_wide = tol.ambiguity();

    const BoundaryFeatures feats = collect_features(primitives);
    std::vector<TangencyEvent> events;

    for (const auto& piece : feats.smooth) {
        const double offset = s - dot(piece.center, theta);
        const double re = piece.support(phi);
        const double resid = std::abs(std::abs(offset) - re);
        if (resid > eps_wide) continue;
        const int sign = offset >= 0 ? +1 : -1;
        Vec2 p = piece.tangent_point(phi, sign);
        if (!piece.on_arc(p, eps_wide)) continue;
        TangencyEvent ev;
        ev.point = p;
        ev.t = dot(p, theta_perp);
        ev.kind = TangencyKind::SmoothArc;
        ev.ambiguous = resid > eps;
        events.push_back(ev);
    }

    for (const auto& edge : feats.edges) {
        Vec2 n = outward_edge_normal(edge.a, edge.b);
        if (std::abs(cross(n, theta)) > 1e-9) continue;  // not collinear
        const double resid = std::abs(dot(edge.a, theta) - s);
        if (resid > eps_wide) continue;
        TangencyEvent ev;
        ev.kind = TangencyKind::EdgeSegment;
        double ta = dot(edge.a, theta_perp), tb = dot(edge.b, theta_perp);
        ev.t_lo = std::min(ta, tb);
        ev.t_hi = std::max(ta, tb);
        ev.t = 0.5 * (ev.t_lo + ev.t_hi);
        ev.point = 0.5 * (edge.a + edge.b);
        ev.ambiguous = resid > eps;
        events.push_back(ev);
    }

    for (const auto& vx : feats.vertices) {
        const double resid = std::abs(dot(vx.point, theta) - s);
        if (resid > eps_wide) continue;
        if (!vx.admits(theta, 1e-9)) continue;
        TangencyEvent ev;
        ev.point = vx.point;
        ev.t = dot(vx.point, theta_perp);
        ev.kind = TangencyKind::VertexFan;
        ev.ambiguous = resid > eps;
        events.push_back(ev);
    }

    // Points interior to the union are not singularities of its indicator.
    int discarded = 0;
    const double margin = tol.tangency();
    std::vector<TangencyEvent> kept;
    for (const auto& ev : events) {
        // For edge segments, probe the midpoint; a fully swallowed edge has
        // its midpoint strictly interior.
        bool interior = false;
        for (size_t j = 0; j < primitives.size(); ++j) {
            if (contains_strict(primitives[j].shape, ev.point, margin)) {
                interior = true;
                break;
            }
        }
        if (interior)
            ++discarded;
        else
            kept.push_back(ev);
    }
    if (discarded_interior) *discarded_interior = discarded;
    std::sort(kept.begin(), kept.end(),
              [](const TangencyEvent& a, const TangencyEvent& b) { return a.t < b.t; });
    return kept;
}

std::vector<TangencyEvent> line_tangencies(const MetalRegion& region, double phi, double s,
                                           const GeometryTol& tol) {
    if (region.primitives.empty())
        throw std::invalid_argument("line_tangencies: empty metal region");
    return line_tangencies(region.primitives, phi, s, tol);
}

// ---------------------------------------------------------------------------
// Candidate enumeration
// ---------------------------------------------------------------------------

namespace {

struct RawLine {
    double phi, s;
};

/// Lines through two circle boundaries tangent to both (up to four).
void circle_circle_bitangents(const SmoothPiece& A, const SmoothPiece& B,
                              std::vector<RawLine>& out) {
    const Vec2 d = B.center - A.center;
    const double dist = norm(d);
    if (dist <= 0) return;
    const Vec2 u{d.x / dist, d.y / dist};
    for (int s1 : {+1, -1}) {
        for (int s2 : {+1, -1}) {
            // offsets must agree: cA.theta + s1 rA == cB.theta + s2 rB
            const double c = (s1 * A.rx - s2 * B.rx) / dist;  // cos of angle(u, theta)
            if (std::abs(c) > 1.0) continue;
            const double beta = std::acos(std::clamp(c, -1.0, 1.0));
            const double base = std::atan2(u.y, u.x);
            for (int sb : {+1, -1}) {
                const double phi = base + sb * beta;
                const double s = dot(A.center, unit_vec(phi)) + s1 * A.rx;
                out.push_back({phi, s});
                if (beta == 0.0) break;
            }
        }
    }
}

/// Bitangents of two support-function pieces (at least one a true ellipse)
/// by scanning the normal angle over [0, pi) for each branch pair and
/// bisecting sign changes of the offset mismatch.
void smooth_pair_bitangents(const SmoothPiece& A, const SmoothPiece& B,
                            double scale, std::vector<RawLine>& out) {
    const int kSamples = 2048;
    const double tol_f = 1e-12 * std::max(scale, 1.0);
    for (int s1 : {+1, -1}) {
        for (int s2 : {+1, -1}) {
            auto f = [&](double phi) {
                const Vec2 th = unit_vec(phi);
                return (dot(A.center, th) + s1 * A.support(phi)) -
                       (dot(B.center, th) + s2 * B.support(phi));
            };
            double prev_phi = 0.0, prev_val = f(0.0);
            for (int i = 1; i <= kSamples; ++i) {
                const double phi = kPi * i / kSamples;
                const double val = f(phi);
                if ((prev_val < 0) != (val < 0) || val == 0.0) {
                    double lo = prev_phi, hi = phi, flo = prev_val;
                    for (int it = 0; it < 200; ++it) {
                        const double mid = 0.5 * (lo + hi);
                        const double fm = f(mid);
                        if (std::abs(fm) < tol_f) { lo = hi = mid; break; }
                        if ((flo < 0) != (fm < 0))
                            hi = mid;
                        else {
                            lo = mid;
                            flo = fm;
                        }
                    }
                    const double root = 0.5 * (lo + hi);
                    out.push_back({root, dot(A.center, unit_vec(root)) + s1 * A.support(root)});
                }
                prev_phi = phi;
                prev_val = val;
            }
        }
    }
}

/// Tangent lines from an external point to a smooth piece.
void point_tangents(Vec2 v, const SmoothPiece& piece, std::vector<RawLine>& out) {
    // Map into the frame where the piece is the unit circle.
    Vec2 local = rotated(v - piece.center, -piece.angle);
    Vec2 w{local.x / piece.rx, local.y / piece.ry};
    const double d = norm(w);
    if (d <= 1.0 + 1e-15) return;  // on or inside: no external tangent
    const double gamma = std::acos(std::clamp(1.0 / d, -1.0, 1.0));
    const double base = std::atan2(w.y, w.x);
    for (int sg : {+1, -1}) {
        Vec2 tp_unit = unit_vec(base + sg * gamma);
        Vec2 tp = piece.center + rotated(Vec2{piece.rx * tp_unit.x, piece.ry * tp_unit.y},
                                         piece.angle);
        Vec2 dir = tp - v;
        const double len = norm(dir);
        if (len <= 0) continue;
        Vec2 n{dir.y / len, -dir.x / len};
        const double phi = std::atan2(n.y, n.x);
        out.push_back({phi, dot(v, n)});
    }
}

}  // namespace

CandidateEnumeration enumerate_streak_candidates(const std::vector<Primitive>& primitives,
                                                 const GeometryTol& tol) {
    if (primitives.empty())
        throw std::invalid_argument("enumerate_streak_candidates: no primitives");

    const BoundaryFeatures feats = collect_features(primitives);
    std::vector<RawLine> raw;

    // Edge-supporting lines.
    for (const auto& e : feats.edges) {
        Vec2 n = outward_edge_normal(e.a, e.b);
        raw.push_back({std::atan2(n.y, n.x), dot(e.a, n)});
    }

    // Smooth-pair bitangents (distinct pieces only; a single convex piece has
    // no self-bitangent).
    for (size_t i = 0; i < feats.smooth.size(); ++i) {
        for (size_t j = i + 1; j < feats.smooth.size(); ++j) {
            const auto& A = feats.smooth[i];
            const auto& B = feats.smooth[j];
            if (A.is_circle() && B.is_circle())
                circle_circle_bitangents(A, B, raw);
            else
                smooth_pair_bitangents(A, B, tol.scale, raw);
        }
    }

    // Vertex-vertex supporting lines.
    for (size_t i = 0; i < feats.vertices.size(); ++i) {
        for (size_t j = i + 1; j < feats.vertices.size(); ++j) {
            Vec2 a = feats.vertices[i].point, b = feats.vertices[j].point;
            Vec2 d = b - a;
            const double len = norm(d);
            if (len < tol.tangency()) continue;
            Vec2 n{d.y / len, -d.x / len};
            if (!feats.vertices[i].admits(n, 1e-9)) continue;
            if (!feats.vertices[j].admits(n, 1e-9)) continue;
            raw.push_back({std::atan2(n.y, n.x), dot(a, n)});
        }
    }

    // Vertex-arc tangents.
    for (const auto& vx : feats.vertices) {
        for (const auto& piece : feats.smooth) {
            std::vector<RawLine> cand;
            point_tangents(vx.point, piece, cand);
            for (const auto& ln : cand) {
                if (!vx.admits(unit_vec(ln.phi), 1e-9)) continue;
                raw.push_back(ln);
            }
        }
    }

    // Canonicalize and deduplicate.
    std::vector<RawLine> uniq;
    for (const auto& ln : raw) {
        auto [p, s] = canonical_line(ln.phi, ln.s);
        bool dup = false;
        for (const auto& u : uniq) {
            if (same_line(u.phi, u.s, p, s, tol.dedup_phi(), tol.dedup_s())) {
                dup = true;
                break;
            }
        }
        if (!dup) uniq.push_back({p, s});
    }

    // Verify each candidate against the union's actual tangency structure.
    CandidateEnumeration result;
    for (const auto& ln : uniq) {
        int discarded = 0;
        auto events = line_tangencies(primitives, ln.phi, ln.s, tol, &discarded);
        if (span_dimension(events, tol) == 2) {
            StreakLine sl;
            sl.phi = ln.phi;
            sl.s = ln.s;
            sl.tangencies = std::move(events);
            sl.span_dim = 2;
            sl.source = StreakSource::Geometry;
            result.lines.push_back(std::move(sl));
        } else if (discarded > 0) {
            ++result.filtered_interior_count;
        }
    }
    std::sort(result.lines.begin(), result.lines.end(),
              [](const StreakLine& a, const StreakLine& b) {
                  return a.phi != b.phi ? a.phi < b.phi : a.s < b.s;
              });
    return result;
}

CandidateEnumeration enumerate_streak_candidates(const std::vector<MetalRegion>& metals,
                                                 const GeometryTol& tol) {
    std::vector<Primitive> prims;
    for (const auto& m : metals)
        prims.insert(prims.end(), m.primitives.begin(), m.primitives.end());
    return enumerate_streak_candidates(prims, tol);
}

bool is_strictly_convex(const MetalRegion& region) {
    if (region.primitives.size() != 1)
        throw std::invalid_argument(
            "is_strictly_convex is defined for single-primitive regions only");
    const Shape& sh = region.primitives[0].shape;
    return std::holds_alternative<Disk>(sh) || std::holds_alternative<EllipseShape>(sh);
}

}  // namespace ctstreak
