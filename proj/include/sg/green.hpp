#pragma once
#include <memory>
#include <unordered_map>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "sg/ball.hpp"
#include "sg/rng.hpp"

namespace sg {

// Every solve recomputes its residual from the graph (never from the matrix);
// anything above this is reported as solver failure.
inline constexpr double kDirichletResidualTol = 1e-10;

// Values over the vertex universe of the system that produced them (domain
// ball members, plus the absorbing outer layer for full-ball systems).
// Boundary entries carry the prescribed boundary data.
struct DirichletSolution {
  std::vector<Vertex> verts;
  std::vector<double> values;
  double residual = 0.0; // max |Laplacian(f) - rhs| over the interior
  std::unordered_map<uint64_t, int32_t, VertexHash> index;

  double at(const Vertex& v) const;              // DomainError off-universe
  double at_or(const Vertex& v, double d) const; // total variant
};

// g_n(., z) over the members of B_center(n); zero off the ball by convention
struct GreenTable {
  int n = 0;
  Vertex z;
  std::shared_ptr<const Ball> domain;
  std::vector<double> values; // parallel to domain->members

  double at(const Vertex& v) const {
    int32_t i = domain->index_of(v);
    return i < 0 ? 0.0 : values[size_t(i)];
  }
};

// Finite Dirichlet problems for the probabilistic Laplacian
//   Lf(x) = (1/deg x) sum_{y~x} f(y) - f(x)
// with interior/boundary split depending on the stopping convention:
//   stopped_ball: interior = B \ inner boundary, absorbing at the inner
//                 boundary (the tau(n) convention used by g_n and exit times)
//   full_ball:    interior = all of B, absorbing at the first layer outside
//                 (the sigma_A convention used by paused-particle positions)
// One factorization per system, shared across right-hand sides.
class DirichletSystem {
 public:
  enum class Backend { Auto, Direct, Iterative };

  static DirichletSystem stopped_ball(std::shared_ptr<const Ball> b,
                                      Backend backend = Backend::Auto);
  static DirichletSystem full_ball(std::shared_ptr<const Ball> b,
                                   Backend backend = Backend::Auto);

  const Ball& domain() const { return *dom_; }
  std::shared_ptr<const Ball> domain_ptr() const { return dom_; }
  const std::vector<Vertex>& verts() const { return verts_; }
  int64_t size() const { return int64_t(verts_.size()); }
  int64_t interior_count() const { return int64_t(interior_.size()); }
  int32_t index_of(const Vertex& v) const {
    auto it = index_.find(v.key());
    return it == index_.end() ? -1 : it->second;
  }
  bool is_interior(const Vertex& v) const {
    int32_t i = index_of(v);
    return i >= 0 && row_of_[size_t(i)] >= 0;
  }

  // rhs and boundary are indexed by universe position (verts()); only the
  // interior entries of rhs and the boundary entries of boundary are read
  DirichletSolution solve(const std::vector<double>& rhs,
                          const std::vector<double>& boundary) const;

  // column g(., z) of the stopped Green function, per universe index;
  // all-zero when z is absorbing, DomainError when z is off the universe
  std::vector<double> green_column(const Vertex& z) const;

  // E_x(time to absorption) for every universe vertex (0 on the boundary)
  std::vector<double> exit_times() const;

  // absorption distribution started from `from`: per universe index,
  // nonzero only on boundary vertices, sums to 1
  std::vector<double> exit_distribution(const Vertex& from) const;

 private:
  DirichletSystem() = default;
  void build(Backend backend);
  Eigen::VectorXd solve_interior(const Eigen::VectorXd& rhs_rows) const;

  std::shared_ptr<const Ball> dom_;
  std::vector<Vertex> verts_; // ball members (+ outer layer for full systems)
  std::unordered_map<uint64_t, int32_t, VertexHash> index_;
  std::vector<int32_t> row_of_;   // universe idx -> interior row, -1 boundary
  std::vector<int32_t> interior_; // row -> universe idx
  std::vector<int32_t> nbr_;      // interior adjacency, universe indices
  std::vector<uint32_t> nbr_off_; // CSR offsets, one row per interior vertex
  bool iterative_ = false;
  Eigen::SparseMatrix<double> A_; // I - P restricted to interior x interior
  std::shared_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu_;
};

GreenTable green(const GraphFamily& g, int n, const Vertex& z);

// f(x) = E_x tau(n) on B_origin(n), zero on the inner boundary
DirichletSolution expected_exit_time_exact(const GraphFamily& g, int n);

struct HarnackResult {
  double max_ratio = 1.0;
  int samples_used = 0;
  int samples_excluded = 0; // degenerate inf <= 0 draws, skipped
};

// worst sup/inf ratio over B_x(n) of nonnegative functions harmonic on
// B_x(2n), boundary data drawn uniformly per sample
HarnackResult harnack_ratio(const GraphFamily& g, const Vertex& x, int n,
                            int samples, uint64_t master_seed);

struct DiagonalGreenRow {
  Vertex z;
  double g_zz = 0.0;
  int dist_boundary = 0;
};

// per-vertex diagonal Green values with distances to the inner boundary,
// for exponent/constant fits; boundary rows are (0, 0)
std::vector<DiagonalGreenRow> diagonal_green_bound_check(const GraphFamily& g,
                                                         int n);

} // namespace sg
