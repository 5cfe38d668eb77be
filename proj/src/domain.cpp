#include "qhlab/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "qhlab/error.hpp"

namespace qhlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  return a < 0.0 ? a + kTwoPi : a;
}

BoundaryPrimitive make_segment(Vec2 a, Vec2 b, int loop, std::optional<Vec2> normal = std::nullopt) {
  BoundaryPrimitive prim;
  prim.kind = BoundaryPrimitive::Kind::kSegment;
  prim.a = a;
  prim.b = b;
  prim.normal = normal ? *normal : normalized(perp(b - a));
  prim.loop = loop;
  return prim;
}

double signed_area(const std::vector<Vec2>& loop) {
  double area = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    area += cross(loop[i], loop[(i + 1) % loop.size()]);
  }
  return 0.5 * area;
}

double segment_segment_distance(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const Vec2 r = b - a;
  const Vec2 s = d - c;
  const double denom = cross(r, s);
  if (denom != 0.0) {
    const double t = cross(c - a, s) / denom;
    const double u = cross(c - a, r) / denom;
    if (t >= 0.0 && t <= 1.0 && u >= 0.0 && u <= 1.0) return 0.0;
  }
  return std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d),
                   point_segment_distance(c, a, b), point_segment_distance(d, a, b)});
}

bool angle_in_sweep(const BoundaryPrimitive& arc, double angle) {
  if (arc.sweep >= kTwoPi) return true;
  return wrap_angle(angle - arc.theta0) <= arc.sweep;
}

// True when the segment [a, b] comes within tol of the arc.
bool segment_touches_arc(Vec2 a, Vec2 b, const BoundaryPrimitive& arc, double tol) {
  const double ra = distance(a, arc.center);
  const double rb = distance(b, arc.center);
  if (arc.sweep >= kTwoPi) {
    // Full circle: the segment misses it iff it stays strictly on one side.
    const double near = point_segment_distance(arc.center, a, b);
    const double far = std::max(ra, rb);
    return !(far < arc.radius - tol || near > arc.radius + tol);
  }
  const Vec2 dvec = b - a;
  const Vec2 f = a - arc.center;
  const double qa = dvec.norm2();
  const double qb = 2.0 * dot(f, dvec);
  const double qc = f.norm2() - arc.radius * arc.radius;
  const double disc = qb * qb - 4.0 * qa * qc;
  if (qa > 0.0 && disc >= 0.0) {
    const double root = std::sqrt(disc);
    for (double t : {(-qb - root) / (2.0 * qa), (-qb + root) / (2.0 * qa)}) {
      if (t < 0.0 || t > 1.0) continue;
      const Vec2 hit = a + dvec * t;
      if (angle_in_sweep(arc, std::atan2(hit.y - arc.center.y, hit.x - arc.center.x))) return true;
    }
  }
  const Vec2 end0 = arc.point_at(0.0);
  const Vec2 end1 = arc.point_at(arc.length());
  return point_segment_distance(end0, a, b) <= tol || point_segment_distance(end1, a, b) <= tol ||
         arc.distance(a) <= tol || arc.distance(b) <= tol;
}

}  // namespace

std::string to_string(AmbientMetric metric) {
  return metric == AmbientMetric::kInner ? "inner" : "euclidean";
}

// ---------------------------------------------------------------------------
// BoundaryPrimitive

double BoundaryPrimitive::length() const {
  if (kind == Kind::kSegment) return qhlab::distance(a, b);
  return radius * sweep;
}

Vec2 BoundaryPrimitive::point_at(double s) const {
  if (kind == Kind::kSegment) {
    const double len = length();
    return len > 0.0 ? lerp(a, b, std::clamp(s / len, 0.0, 1.0)) : a;
  }
  const double theta = theta0 + std::clamp(s, 0.0, length()) / radius;
  return center + Vec2{std::cos(theta), std::sin(theta)} * radius;
}

Vec2 BoundaryPrimitive::inward_normal_at(double s) const {
  if (kind == Kind::kSegment) return normal;
  return normalized(center - point_at(s));
}

double BoundaryPrimitive::closest_offset(Vec2 p) const {
  if (kind == Kind::kSegment) {
    const Vec2 ab = b - a;
    const double len2 = ab.norm2();
    if (len2 == 0.0) return 0.0;
    return std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) * std::sqrt(len2);
  }
  const Vec2 rel = p - center;
  if (rel.norm2() == 0.0) return 0.0;
  const double delta = wrap_angle(std::atan2(rel.y, rel.x) - theta0);
  if (delta <= sweep) return delta * radius;
  const double to_start = kTwoPi - delta;
  const double past_end = delta - sweep;
  return to_start < past_end ? 0.0 : length();
}

double BoundaryPrimitive::distance(Vec2 p) const {
  if (kind == Kind::kSegment) return point_segment_distance(p, a, b);
  const Vec2 rel = p - center;
  if (sweep >= kTwoPi || angle_in_sweep(*this, std::atan2(rel.y, rel.x))) {
    return std::abs(rel.norm() - radius);
  }
  return std::min(qhlab::distance(p, point_at(0.0)), qhlab::distance(p, point_at(length())));
}

// ---------------------------------------------------------------------------
// Domain construction

Domain::Domain(DomainShape shape, AmbientMetric metric) : shape_(std::move(shape)), metric_(metric) {}

Domain Domain::disk(Vec2 center, double radius, AmbientMetric metric) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw Error(ErrorCode::kInvalidParameter, "disk radius must be positive");
  }
  Domain d(Disk{center, radius}, metric);
  BoundaryPrimitive arc;
  arc.kind = BoundaryPrimitive::Kind::kArc;
  arc.center = center;
  arc.radius = radius;
  arc.theta0 = 0.0;
  arc.sweep = kTwoPi;
  arc.a = arc.b = center + Vec2{radius, 0.0};
  d.primitives_.push_back(arc);
  d.bbox_ = {center.x - radius, center.x + radius, center.y - radius, center.y + radius};
  d.finalize();
  return d;
}

Domain Domain::rectangle(double x_min, double x_max, double y_min, double y_max, AmbientMetric metric) {
  if (!(x_max > x_min) || !(y_max > y_min)) {
    throw Error(ErrorCode::kInvalidParameter, "rectangle ranges must be nonempty");
  }
  Domain d(Rectangle{x_min, x_max, y_min, y_max}, metric);
  const Vec2 p00{x_min, y_min}, p10{x_max, y_min}, p11{x_max, y_max}, p01{x_min, y_max};
  d.primitives_ = {make_segment(p00, p10, 0), make_segment(p10, p11, 0), make_segment(p11, p01, 0),
                   make_segment(p01, p00, 0)};
  d.bbox_ = {x_min, x_max, y_min, y_max};
  d.arclength_origin_ = 0.5 * (x_max - x_min);
  d.finalize();
  return d;
}

Domain Domain::polygon(PolygonWithHoles polygon, AmbientMetric metric) {
  if (polygon.loops.empty()) throw Error(ErrorCode::kInvalidParameter, "polygon needs an outer loop");
  for (std::size_t i = 0; i < polygon.loops.size(); ++i) {
    auto& loop = polygon.loops[i];
    if (loop.size() < 3) throw Error(ErrorCode::kInvalidParameter, "polygon loops need at least 3 vertices");
    const double area = signed_area(loop);
    if (area == 0.0) throw Error(ErrorCode::kInvalidParameter, "degenerate polygon loop");
    // Outer loop counter-clockwise, holes clockwise: the domain is always on the left.
    if ((i == 0) != (area > 0.0)) std::reverse(loop.begin(), loop.end());
  }
  Domain d(polygon, metric);
  BoundingBox box{std::numeric_limits<double>::max(), std::numeric_limits<double>::lowest(),
                  std::numeric_limits<double>::max(), std::numeric_limits<double>::lowest()};
  for (std::size_t li = 0; li < polygon.loops.size(); ++li) {
    const auto& loop = polygon.loops[li];
    for (std::size_t i = 0; i < loop.size(); ++i) {
      d.primitives_.push_back(make_segment(loop[i], loop[(i + 1) % loop.size()], static_cast<int>(li)));
      box.x_min = std::min(box.x_min, loop[i].x);
      box.x_max = std::max(box.x_max, loop[i].x);
      box.y_min = std::min(box.y_min, loop[i].y);
      box.y_max = std::max(box.y_max, loop[i].y);
    }
  }
  d.bbox_ = box;
  d.finalize();
  return d;
}

Domain Domain::comb(int teeth, AmbientMetric metric) {
  if (teeth < 1) throw Error(ErrorCode::kInvalidParameter, "comb needs at least one tooth");
  if (teeth > 40) throw Error(ErrorCode::kInvalidParameter, "comb teeth beyond 2^-40 are below double resolution");
  Domain d(Comb{teeth}, metric);
  const Vec2 p00{0, 0}, p10{1, 0}, p11{1, 1}, p01{0, 1};
  d.primitives_ = {make_segment(p00, p10, 0), make_segment(p10, p11, 0), make_segment(p11, p01, 0),
                   make_segment(p01, p00, 0)};
  for (int j = 1; j <= teeth; ++j) {
    const double x = std::ldexp(1.0, -j);
    const Vec2 foot{x, 0.0};
    const Vec2 tip{x, 0.5};
    d.primitives_.push_back(make_segment(foot, tip, j, Vec2{-1.0, 0.0}));
    d.primitives_.push_back(make_segment(tip, tip, j, Vec2{0.0, 1.0}));
    d.primitives_.push_back(make_segment(tip, foot, j, Vec2{1.0, 0.0}));
  }
  d.bbox_ = {0.0, 1.0, 0.0, 1.0};
  d.finalize();
  return d;
}

void Domain::finalize() {
  diameter_ = std::holds_alternative<Disk>(shape_) ? 2.0 * std::get<Disk>(shape_).radius : bbox_.diameter();
  tol_ = 1e-12 * diameter_;

  primitive_start_.clear();
  loops_.clear();
  double s = 0.0;
  for (std::size_t i = 0; i < primitives_.size(); ++i) {
    const int loop = primitives_[i].loop;
    if (loops_.empty() || loops_.back().first_primitive + loops_.back().primitive_count != static_cast<int>(i) ||
        primitives_[loops_.back().first_primitive].loop != loop) {
      loops_.push_back({static_cast<int>(i), 0, s, 0.0});
    }
    primitive_start_.push_back(s);
    const double len = primitives_[i].length();
    loops_.back().primitive_count += 1;
    loops_.back().length += len;
    s += len;
  }
  boundary_length_ = s;

  constexpr int kLattice = 257;
  max_delta_ = 0.0;
  for (int iy = 0; iy < kLattice; ++iy) {
    for (int ix = 0; ix < kLattice; ++ix) {
      const Vec2 p{bbox_.x_min + bbox_.width() * ix / (kLattice - 1),
                   bbox_.y_min + bbox_.height() * iy / (kLattice - 1)};
      if (contains(p)) max_delta_ = std::max(max_delta_, boundary_distance(p));
    }
  }
}

Domain Domain::with_ambient_metric(AmbientMetric metric) const {
  Domain copy = *this;
  copy.metric_ = metric;
  return copy;
}

std::string Domain::kind_name() const {
  struct Visitor {
    std::string operator()(const Disk&) const { return "disk"; }
    std::string operator()(const Rectangle&) const { return "rectangle"; }
    std::string operator()(const PolygonWithHoles&) const { return "polygon"; }
    std::string operator()(const Comb&) const { return "comb"; }
  };
  return std::visit(Visitor{}, shape_);
}

// ---------------------------------------------------------------------------
// Queries

bool Domain::inside_region(Vec2 p) const {
  struct Visitor {
    Vec2 p;
    bool operator()(const Disk& d) const { return (p - d.center).norm2() < d.radius * d.radius; }
    bool operator()(const Rectangle& r) const {
      return p.x > r.x_min && p.x < r.x_max && p.y > r.y_min && p.y < r.y_max;
    }
    bool operator()(const Comb&) const { return p.x > 0.0 && p.x < 1.0 && p.y > 0.0 && p.y < 1.0; }
    bool operator()(const PolygonWithHoles& poly) const {
      bool inside = false;
      for (const auto& loop : poly.loops) {
        for (std::size_t i = 0, j = loop.size() - 1; i < loop.size(); j = i++) {
          const Vec2 a = loop[i], b = loop[j];
          if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) {
            inside = !inside;
          }
        }
      }
      return inside;
    }
  };
  return std::visit(Visitor{p}, shape_);
}

double Domain::boundary_distance(Vec2 p) const {
  if (const auto* disk = std::get_if<Disk>(&shape_)) {
    return std::abs(disk->radius - distance(p, disk->center));
  }
  double best = std::numeric_limits<double>::infinity();
  for (const auto& prim : primitives_) best = std::min(best, prim.distance(p));
  return best;
}

bool Domain::contains(Vec2 p) const {
  return std::isfinite(p.x) && std::isfinite(p.y) && inside_region(p) && boundary_distance(p) > tol_;
}

double Domain::dist_to_boundary(Vec2 p) const {
  if (!contains(p)) throw Error(ErrorCode::kOutsideDomain, "point is not inside the domain");
  return boundary_distance(p);
}

bool Domain::segment_inside(Vec2 a, Vec2 b) const {
  if (!contains(a) || !contains(b)) return false;
  const double len = distance(a, b);
  // The open disk of radius delta(a) around a lies in the domain.
  if (len < std::max(boundary_distance(a), boundary_distance(b))) return true;
  for (const auto& prim : primitives_) {
    if (prim.kind == BoundaryPrimitive::Kind::kSegment) {
      if (segment_segment_distance(a, b, prim.a, prim.b) <= tol_) return false;
    } else if (segment_touches_arc(a, b, prim, tol_)) {
      return false;
    }
  }
  return true;
}

BoundaryPoint Domain::point_at_arclength(double s) const {
  if (boundary_length_ <= 0.0) throw Error(ErrorCode::kInternal, "domain has no boundary");
  s = std::fmod(s, boundary_length_);
  if (s < 0.0) s += boundary_length_;
  auto it = std::upper_bound(primitive_start_.begin(), primitive_start_.end(), s);
  int idx = static_cast<int>(std::distance(primitive_start_.begin(), it)) - 1;
  idx = std::clamp(idx, 0, static_cast<int>(primitives_.size()) - 1);
  while (primitives_[idx].length() == 0.0 && idx + 1 < static_cast<int>(primitives_.size())) ++idx;
  const auto& prim = primitives_[idx];
  const double offset = std::clamp(s - primitive_start_[idx], 0.0, prim.length());
  BoundaryPoint bp;
  bp.position = prim.point_at(offset);
  bp.corridor = corridor_at(idx, offset);
  bp.coordinate = BoundaryCoordinate{idx, offset, primitive_start_[idx] + offset};
  return bp;
}

Vec2 Domain::corridor_at(int idx, double offset) const {
  const auto& prim = primitives_[idx];
  const Vec2 n = prim.inward_normal_at(offset);
  const auto& loop = loops_[prim.loop];
  const int local = idx - loop.first_primitive;
  int other = -1;
  double other_offset = 0.0;
  if (offset <= tol_) {
    other = loop.first_primitive + (local + loop.primitive_count - 1) % loop.primitive_count;
    other_offset = primitives_[other].length();
  } else if (offset >= prim.length() - tol_) {
    other = loop.first_primitive + (local + 1) % loop.primitive_count;
  }
  if (other < 0 || other == idx) return n;
  const Vec2 m = primitives_[other].inward_normal_at(other_offset);
  const Vec2 sum = n + m;
  // Smooth joins keep their normal; a slit tip (opposite normals) too.
  if (dot(n, m) > 1.0 - 1e-12 || sum.norm() < 1e-9) return n;
  return normalized(sum);
}

BoundaryPoint Domain::project(Vec2 p, std::optional<Vec2> corridor_hint) const {
  int best = -1;
  double best_dist = std::numeric_limits<double>::infinity();
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < primitives_.size(); ++i) {
    const auto& prim = primitives_[i];
    const double offset = prim.closest_offset(p);
    const Vec2 q = prim.point_at(offset);
    const double dist = distance(p, q);
    const Vec2 n = prim.inward_normal_at(offset);
    // Prefer primitives that face p, then the one matching the hint.
    double score = dot(n, p - q) > tol_ ? 2.0 : 0.0;
    if (corridor_hint) score += dot(n, *corridor_hint);
    if (dist < best_dist - tol_ || (dist <= best_dist + tol_ && score > best_score)) {
      best = static_cast<int>(i);
      best_dist = std::min(dist, best_dist);
      best_score = score;
    }
  }
  const auto& prim = primitives_[best];
  const double offset = prim.closest_offset(p);
  BoundaryPoint bp;
  bp.position = prim.point_at(offset);
  bp.corridor = corridor_hint ? normalized(*corridor_hint) : corridor_at(best, offset);
  bp.coordinate = BoundaryCoordinate{best, offset, primitive_start_[best] + offset};
  return bp;
}

BoundaryPoint Domain::resolve(const BoundaryPoint& p) const {
  if (p.coordinate && p.corridor) return p;
  BoundaryPoint out = project(p.position, p.corridor);
  out.position = p.position;
  return out;
}

Vec2 Domain::inward_direction(const BoundaryPoint& p) const {
  if (p.corridor) return normalized(*p.corridor);
  return *resolve(p).corridor;
}

double Domain::arclength_distance(const BoundaryPoint& p, const BoundaryPoint& q) const {
  const BoundaryPoint rp = resolve(p);
  const BoundaryPoint rq = resolve(q);
  const int lp = primitives_[rp.coordinate->primitive].loop;
  const int lq = primitives_[rq.coordinate->primitive].loop;
  if (lp != lq) return distance(p.position, q.position);
  const auto& loop = *std::find_if(loops_.begin(), loops_.end(),
                                   [&](const BoundaryLoop& l) { return primitives_[l.first_primitive].loop == lp; });
  const double d = std::abs(rp.coordinate->arclength - rq.coordinate->arclength);
  return std::min(d, loop.length - d);
}

bool Domain::same_boundary_point(const BoundaryPoint& p, const BoundaryPoint& q) const {
  if (distance(p.position, q.position) > 1e-9 * diameter_) return false;
  if (metric_ == AmbientMetric::kEuclidean) return true;
  if (!p.corridor || !q.corridor) return true;
  return dot(normalized(*p.corridor), normalized(*q.corridor)) > -0.9;
}

// ---------------------------------------------------------------------------
// Free functions

Domain make_comb_domain(int teeth) { return Domain::comb(teeth, AmbientMetric::kInner); }

bool contains(const Domain& domain, Vec2 p) { return domain.contains(p); }

double dist_to_boundary(const Domain& domain, Vec2 p) { return domain.dist_to_boundary(p); }

std::vector<BoundaryPoint> boundary_sample(const Domain& domain, int n) {
  if (n < 1) throw Error(ErrorCode::kInvalidParameter, "boundary_sample needs n >= 1");
  std::vector<BoundaryPoint> out;
  out.reserve(n);
  const double step = domain.boundary_length() / n;
  for (int i = 0; i < n; ++i) out.push_back(domain.point_at_arclength(domain.arclength_origin() + i * step));
  return out;
}

}  // namespace qhlab
