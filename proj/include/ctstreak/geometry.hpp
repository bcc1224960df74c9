#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <variant>
#include <vector>

// 2-D phantom geometry: attenuation primitives, membership tests, and the
// exact line-tangency analysis used to enumerate candidate streak lines.
//
// Line convention used throughout the toolkit:
//   L(phi, s) = { s*theta + t*theta_perp : t in R },
//   theta = (cos phi, sin phi), theta_perp = (-sin phi, cos phi).
// A point x lies on L(phi, s) iff x . theta == s.  The pairs (phi, s) and
// (phi +- pi, -s) name the same line; canonical_line() maps onto
// phi in [0, pi).

namespace ctstreak {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double k, Vec2 v) { return {k * v.x, k * v.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline Vec2 unit_vec(double angle) { return {std::cos(angle), std::sin(angle)}; }
inline Vec2 rotated(Vec2 v, double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

/// Normalize an angle into (-pi, pi].
double wrap_angle(double a);

// ---------------------------------------------------------------------------
// Primitives
// ---------------------------------------------------------------------------

struct Disk {
    Vec2 center;
    double radius = 0.0;
};

struct EllipseShape {
    Vec2 center;
    double rx = 0.0;  ///< semi-axis along the rotated x direction
    double ry = 0.0;  ///< semi-axis along the rotated y direction
    double angle = 0.0;
};

/// Simple convex polygon, vertices in counterclockwise order.
struct ConvexPolygon {
    std::vector<Vec2> vertices;
};

/// Circular sector: the set of points within `radius` of `center` whose
/// polar angle (about the center) lies in [angle_start, angle_end] mod 2pi.
/// Angular extent must be in (0, 2pi).  The boundary is one arc plus two
/// straight edges meeting at the center and the two outer corners.
struct DiskSector {
    Vec2 center;
    double radius = 0.0;
    double angle_start = 0.0;
    double angle_end = 0.0;

    double extent() const;  ///< in (0, 2pi)
};

using Shape = std::variant<Disk, EllipseShape, ConvexPolygon, DiskSector>;

/// One attenuation primitive: a shape contributing `value` (1/length) inside.
/// Contributions are additive across primitives.
struct Primitive {
    Shape shape;
    double value = 0.0;
};

/// Throws std::invalid_argument if the shape violates its invariants
/// (nonpositive radius, degenerate or non-convex or clockwise polygon,
/// sector extent outside (0, 2pi)).
void validate_shape(const Shape& shape);

/// Closed-set membership: boundary points count as inside.
bool contains(const Shape& shape, Vec2 p);
bool contains(const Primitive& prim, Vec2 p);

/// Farthest distance from the origin to any point of the shape.
double support_radius(const Shape& shape);

/// Shape rotated by `angle` about the origin.
Shape rotated(const Shape& shape, double angle);

// ---------------------------------------------------------------------------
// Phantom
// ---------------------------------------------------------------------------

/// A connected metal region (union of primitives) with per-primitive
/// spectral slopes alpha_j < 0 (attenuation change per unit energy).
struct MetalRegion {
    std::vector<Primitive> primitives;
    std::vector<double> alpha;  ///< one per primitive, all < 0
    std::string label = "metal";
};

struct Phantom {
    std::vector<Primitive> background;
    std::vector<MetalRegion> metals;
    double fov = 1.0;        ///< half-width of the square field of view
    int hull_index = -1;     ///< background index of the convex hull D0, or -1

    bool has_metal() const;
    std::vector<Primitive> metal_primitives() const;
    /// (primitive, alpha) pairs flattened across regions.
    std::vector<std::pair<Primitive, double>> metal_primitives_alpha() const;
};

/// Validates region/phantom invariants: alpha_j < 0, shapes valid, every
/// primitive within the field of view.  Throws std::invalid_argument.
void validate_phantom(const Phantom& phantom);

/// Attenuation at reference energy: f_E0(x), the sum of all primitive values
/// containing x (metal primitives contribute their value at E0 too).
double attenuation_at(const Phantom& phantom, Vec2 p);

/// Energy-dependent attenuation f_E(x) = f_E0(x) + sum_j alpha_j (E - E0) chi_j(x).
double attenuation_at(const Phantom& phantom, Vec2 p, double energy, double e0);

/// Assumption check: min f_E0 over the metal support vs. max f_E0 outside the
/// metal closure, sampled on an n x n raster.  The assumption asks for a
/// ratio C > 1; a violation is a warning for callers, never an error here.
struct ContrastCheck {
    double ratio = 0.0;  ///< min-inside / max-outside
    bool holds = false;  ///< ratio > 1
    double min_inside_metal = 0.0;
    double max_outside_metal = 0.0;
};
ContrastCheck metal_contrast_check(const Phantom& phantom, int n = 256);

// ---------------------------------------------------------------------------
// Tangency analysis
// ---------------------------------------------------------------------------

enum class TangencyKind { SmoothArc, EdgeSegment, VertexFan };

/// A boundary point of the metal union at which the line L(phi, s) meets the
/// boundary conormally.  `t` is the coordinate of the point along theta_perp,
/// so the covector attached at (phi, s) is a*(-t, 1).
struct TangencyEvent {
    Vec2 point;
    double t = 0.0;
    TangencyKind kind = TangencyKind::SmoothArc;
    double t_lo = 0.0;  ///< edge-segment events cover [t_lo, t_hi]
    double t_hi = 0.0;
    bool ambiguous = false;  ///< within the wide tolerance band but not exact
};

enum class StreakSource { Geometry, Scatter, NoiseSpike };

struct StreakLine {
    double phi = 0.0;  ///< canonical in [0, pi)
    double s = 0.0;
    std::vector<TangencyEvent> tangencies;
    int span_dim = 1;  ///< 2 iff >= 2 distinct tangency parameters
    StreakSource source = StreakSource::Geometry;
};

/// Canonical representative of the line class {(phi, s), (phi +- pi, -s)}
/// with phi in [0, pi).
std::pair<double, double> canonical_line(double phi, double s);

/// True if the two (phi, s) pairs name the same line within tolerances
/// (dphi in radians, ds in length units), modulo the (phi +- pi, -s)
/// identification.
bool same_line(double phi1, double s1, double phi2, double s2,
               double tol_phi = 1e-6, double tol_s = 1e-6);

/// Geometric tolerances; lengths scale with the scene size.
struct GeometryTol {
    double scale = 1.0;          ///< scene scale (typically the phantom fov)
    double tangency() const { return 1e-9 * scale; }
    double ambiguity() const { return 1e-6 * scale; }
    double dedup_phi() const { return 1e-6; }
    double dedup_s() const { return 1e-6 * scale; }
};

/// Exact tangency events of L(phi, s) against the boundary of the union of
/// `primitives`.  Events whose point lies strictly inside another primitive
/// (hence interior to the union) are discarded; `discarded_interior`, when
/// non-null, receives their count.
std::vector<TangencyEvent> line_tangencies(const std::vector<Primitive>& primitives,
                                           double phi, double s,
                                           const GeometryTol& tol,
                                           int* discarded_interior = nullptr);

std::vector<TangencyEvent> line_tangencies(const MetalRegion& region,
                                           double phi, double s,
                                           const GeometryTol& tol);

/// Span dimension of the conormal directions {a(-t, 1)} attached at (phi, s):
/// 2 iff the events cover >= 2 distinct t values (an edge segment alone
/// suffices).  Ambiguous events are not counted.
int span_dimension(const std::vector<TangencyEvent>& events, const GeometryTol& tol);

struct CandidateEnumeration {
    std::vector<StreakLine> lines;          ///< span_dim == 2, sorted by (phi, s)
    int filtered_interior_count = 0;        ///< candidates dropped because a
                                            ///< tangency fell inside the union
};

/// Enumerates every line with span dimension 2 against the union of all the
/// given primitives: edge-supporting lines, smooth-pair bitangents
/// (circle-circle analytic, ellipse pairs by 1-D root scanning),
/// vertex-vertex supporting lines, and vertex-arc tangents.
CandidateEnumeration enumerate_streak_candidates(const std::vector<Primitive>& primitives,
                                                 const GeometryTol& tol);

CandidateEnumeration enumerate_streak_candidates(const std::vector<MetalRegion>& metals,
                                                 const GeometryTol& tol);

/// True for a disk or ellipse, false for polygon and disk sector (flat
/// edges).  Throws std::invalid_argument for multi-primitive regions.
bool is_strictly_convex(const MetalRegion& region);

}  // namespace ctstreak
