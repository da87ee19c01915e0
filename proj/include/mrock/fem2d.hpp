#pragma once

// P1 finite elements for the heat equation on triangulated planar domains,
// with newest-vertex-bisection refinement and a fast/slow operator split.

#include <array>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mrock/problems.hpp"
#include "mrock/types.hpp"

namespace mrock {

using Point2 = Eigen::Vector2d;

/// Triangles are stored counter-clockwise with vertex 0 the newest vertex,
/// i.e. the edge (1, 2) is the refinement edge.
struct Mesh {
  std::vector<Point2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<char> boundary;  // per vertex
  std::vector<int> level;      // per triangle: bisections since the base mesh
  std::vector<char> fast;      // per triangle: member of the fast set

  int num_vertices() const { return int(vertices.size()); }
  int num_triangles() const { return int(triangles.size()); }
};

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Signed area (positive for counter-clockwise triangles).
double triangle_area(const Mesh& mesh, int t);
/// Longest edge.
double triangle_diameter(const Mesh& mesh, int t);

/// Checks that every triangle is counter-clockwise with nonzero area, every
/// edge is shared by at most two triangles and no edge carries a hanging
/// node at its midpoint. On failure returns false and fills `why`.
bool is_conforming(const Mesh& mesh, std::string* why = nullptr);

/// 2^j x 2^j cells of two triangles each (diagonal from lower left to upper
/// right), then `local_levels` passes that split every triangle meeting the
/// open square (1/4, 3/4)^2 into four by two bisections, with conforming
/// closure. The fast set is every triangle whose closure meets [1/4, 3/4]^2.
Mesh unit_square_mesh(int j, int local_levels);

/// The unit square minus [0.5, 1] x [0, 0.5]. Base cells have diameter
/// <= H; triangles are bisected while their diameter exceeds
/// max(h, dist(T, corner)) with the reentrant corner at (0.5, 0.5). Fast set:
/// triangles of diameter below (H_base + min(h, H_base))/2 and every
/// triangle sharing a vertex with one of them.
Mesh lshape_mesh(double H, double h);

/// Plain-text listing:
///   vertices N
///   x y boundary          (N lines)
///   triangles M
///   a b c level fast      (M lines)
void write_mesh(std::ostream& out, const Mesh& mesh);

/// Element stiffness of the P1 basis on the triangle (a, b, c).
Eigen::Matrix3d p1_stiffness(const Point2& a, const Point2& b, const Point2& c);

enum class ForcingKind { Zero, Manufactured, Gaussian };

/// Manufactured: u = sin^2(pi x) sin^2(pi y) sin^2(pi t) and g = u_t - lap u.
/// Gaussian: g = amplitude exp(-|x - center|^2 / sigma^2), constant in time.
struct Forcing {
  ForcingKind kind = ForcingKind::Manufactured;
  Point2 center{0.5, 0.5};
  double sigma = 0.1;
  double amplitude = 10.0;
};

double manufactured_solution(const Point2& x, double t);
double manufactured_source(const Point2& x, double t);
double gaussian_source(const Forcing& f, const Point2& x);

/// y' = A y + G(t) on the interior vertices, A = -M^{-1} K with row-sum
/// lumped M, split as A_F = D A and A_S = (I - D) A.
struct DiscreteHeatSystem {
  SparseMatrix a;
  SparseMatrix a_fast;
  SparseMatrix a_slow;
  Vector mass;      // lumped mass per dof
  Vector selector;  // diagonal of D
  std::vector<int> dof_vertex;
  Source load;                             // G(t)
  std::function<Vector(double t)> exact;   // zero and manufactured forcing
  Eigen::Index n = 0;

  /// sqrt(sum_i M_i v_i^2).
  double lumped_norm(const Vector& v) const;
};

/// Throws MeshError naming the first degenerate triangle.
DiscreteHeatSystem assemble_heat(const Mesh& mesh, const Forcing& forcing);

/// The assembled system as a SplitSystem with zero initial data.
SplitSystem heat_split_system(const DiscreteHeatSystem& heat, const LinearRadiusOptions& opts = {});

}  // namespace mrock
