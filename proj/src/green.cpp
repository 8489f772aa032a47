#include "sg/green.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include <Eigen/IterativeLinearSolvers>

#include "sg/error.hpp"

namespace sg {

double DirichletSolution::at(const Vertex& v) const {
  auto it = index.find(v.key());
  if (it == index.end())
    throw DomainError("vertex outside the solved domain: " + format_vertex(v));
  return values[size_t(it->second)];
}

double DirichletSolution::at_or(const Vertex& v, double d) const {
  auto it = index.find(v.key());
  return it == index.end() ? d : values[size_t(it->second)];
}

// ===== system assembly =====

namespace {
// direct factorization is kept up to this many unknowns; larger systems fall
// back to BiCGSTAB (tolerance well below the residual gate)
constexpr int64_t kDirectSolveCap = 20000;
} // namespace

DirichletSystem DirichletSystem::stopped_ball(std::shared_ptr<const Ball> b,
                                              Backend backend) {
  DirichletSystem s;
  s.dom_ = std::move(b);
  s.verts_ = s.dom_->members;
  s.row_of_.assign(s.verts_.size(), -1);
  for (size_t i = 0; i < s.verts_.size(); ++i)
    if (!s.dom_->inner_bdy[i]) {
      s.row_of_[i] = int32_t(s.interior_.size());
      s.interior_.push_back(int32_t(i));
    }
  s.build(backend);
  return s;
}

DirichletSystem DirichletSystem::full_ball(std::shared_ptr<const Ball> b,
                                           Backend backend) {
  DirichletSystem s;
  s.dom_ = std::move(b);
  s.verts_ = s.dom_->members;

  // absorbing layer: every outside neighbor of an inner-boundary member,
  // appended in canonical order so the universe is reproducible
  std::vector<Vertex> outer;
  std::unordered_set<uint64_t, VertexHash> seen;
  std::array<Vertex, 6> nb;
  for (size_t i = 0; i < s.verts_.size(); ++i) {
    if (!s.dom_->inner_bdy[i]) continue;
    int cnt = s.dom_->family.neighbors(s.verts_[i], nb);
    for (int j = 0; j < cnt; ++j)
      if (!s.dom_->contains(nb[j]) && seen.insert(nb[j].key()).second)
        outer.push_back(nb[j]);
  }
  std::sort(outer.begin(), outer.end(), vertex_less);

  s.row_of_.assign(s.verts_.size(), -1);
  for (size_t i = 0; i < s.verts_.size(); ++i) {
    s.row_of_[i] = int32_t(s.interior_.size());
    s.interior_.push_back(int32_t(i));
  }
  for (const Vertex& v : outer) {
    s.verts_.push_back(v);
    s.row_of_.push_back(-1);
  }
  s.build(backend);
  return s;
}

void DirichletSystem::build(Backend backend) {
  index_.reserve(verts_.size() * 2);
  for (size_t i = 0; i < verts_.size(); ++i) index_[verts_[i].key()] = int32_t(i);

  const GraphFamily& g = dom_->family;
  std::array<Vertex, 6> nb;
  nbr_off_.push_back(0);
  for (int32_t ui : interior_) {
    int cnt = g.neighbors(verts_[size_t(ui)], nb);
    for (int j = 0; j < cnt; ++j) {
      auto it = index_.find(nb[j].key());
      if (it == index_.end())
        throw NumericError("dirichlet system is not closed at " +
                           format_vertex(verts_[size_t(ui)]));
      nbr_.push_back(it->second);
    }
    nbr_off_.push_back(uint32_t(nbr_.size()));
  }

  int64_t m = interior_count();
  iterative_ = backend == Backend::Iterative ||
               (backend == Backend::Auto && m > kDirectSolveCap);
  if (m == 0) return;

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(size_t(m) * 5);
  for (int64_t r = 0; r < m; ++r) {
    trip.emplace_back(int(r), int(r), 1.0);
    uint32_t lo = nbr_off_[size_t(r)], hi = nbr_off_[size_t(r) + 1];
    double w = 1.0 / double(hi - lo);
    for (uint32_t e = lo; e < hi; ++e) {
      int32_t c = row_of_[size_t(nbr_[e])];
      if (c >= 0) trip.emplace_back(int(r), int(c), -w);
    }
  }
  A_.resize(int(m), int(m));
  A_.setFromTriplets(trip.begin(), trip.end());
  A_.makeCompressed();

  if (!iterative_) {
    lu_ = std::make_shared<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
    lu_->analyzePattern(A_);
    lu_->factorize(A_);
    if (lu_->info() != Eigen::Success)
      throw NumericError("sparse factorization failed on " +
                         std::to_string(m) + " unknowns");
  }
}

Eigen::VectorXd DirichletSystem::solve_interior(
    const Eigen::VectorXd& rhs_rows) const {
  if (!iterative_) return lu_->solve(rhs_rows);
  Eigen::BiCGSTAB<Eigen::SparseMatrix<double>> it;
  it.setTolerance(1e-13);
  it.setMaxIterations(200000);
  it.compute(A_);
  Eigen::VectorXd f = it.solve(rhs_rows);
  if (it.info() != Eigen::Success)
    throw NumericError("iterative dirichlet solve did not converge, error " +
                       std::to_string(it.error()));
  return f;
}

DirichletSolution DirichletSystem::solve(
    const std::vector<double>& rhs, const std::vector<double>& boundary) const {
  if (rhs.size() != verts_.size() || boundary.size() != verts_.size())
    throw DomainError("rhs/boundary must be indexed by the system universe");

  DirichletSolution sol;
  sol.verts = verts_;
  sol.index = index_;
  sol.values.assign(verts_.size(), 0.0);
  for (size_t i = 0; i < verts_.size(); ++i)
    if (row_of_[i] < 0) sol.values[i] = boundary[i];

  int64_t m = interior_count();
  if (m > 0) {
    Eigen::VectorXd b(m);
    for (int64_t r = 0; r < m; ++r) {
      uint32_t lo = nbr_off_[size_t(r)], hi = nbr_off_[size_t(r) + 1];
      double w = 1.0 / double(hi - lo);
      double acc = -rhs[size_t(interior_[size_t(r)])];
      for (uint32_t e = lo; e < hi; ++e) {
        int32_t j = nbr_[e];
        if (row_of_[size_t(j)] < 0) acc += w * boundary[size_t(j)];
      }
      b[r] = acc;
    }
    Eigen::VectorXd f = solve_interior(b);
    for (int64_t r = 0; r < m; ++r)
      sol.values[size_t(interior_[size_t(r)])] = f[r];
  }

  // honest residual: recomputed from the graph, not from the matrix
  double res = 0.0;
  for (int64_t r = 0; r < m; ++r) {
    uint32_t lo = nbr_off_[size_t(r)], hi = nbr_off_[size_t(r) + 1];
    double mean = 0.0;
    for (uint32_t e = lo; e < hi; ++e) mean += sol.values[size_t(nbr_[e])];
    mean /= double(hi - lo);
    size_t ui = size_t(interior_[size_t(r)]);
    res = std::max(res, std::abs(mean - sol.values[ui] - rhs[ui]));
  }
  sol.residual = res;
  if (res > kDirichletResidualTol)
    throw NumericError("dirichlet solve residual " + std::to_string(res) +
                       " above tolerance");
  return sol;
}

std::vector<double> DirichletSystem::green_column(const Vertex& z) const {
  int32_t i = index_of(z);
  if (i < 0)
    throw DomainError("green target outside the domain: " + format_vertex(z));
  std::vector<double> rhs(verts_.size(), 0.0), bnd(verts_.size(), 0.0);
  if (row_of_[size_t(i)] < 0) return rhs; // absorbing z: all-zero table
  rhs[size_t(i)] = -1.0;
  return solve(rhs, bnd).values;
}

std::vector<double> DirichletSystem::exit_times() const {
  std::vector<double> rhs(verts_.size(), -1.0), bnd(verts_.size(), 0.0);
  return solve(rhs, bnd).values;
}

std::vector<double> DirichletSystem::exit_distribution(const Vertex& from) const {
  int32_t fi = index_of(from);
  if (fi < 0)
    throw DomainError("start outside the domain: " + format_vertex(from));
  std::vector<double> nu(verts_.size(), 0.0);
  if (row_of_[size_t(fi)] < 0) { // started absorbed
    nu[size_t(fi)] = 1.0;
    return nu;
  }

  // visit counts seen from `from` are a row, not a column: solve with the
  // transposed operator, then push one averaged step onto the boundary
  int64_t m = interior_count();
  Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
  e[row_of_[size_t(fi)]] = 1.0;
  Eigen::SparseMatrix<double> At = A_.transpose();
  Eigen::VectorXd mu(m);
  if (!iterative_) {
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.analyzePattern(At);
    lu.factorize(At);
    if (lu.info() != Eigen::Success)
      throw NumericError("transpose factorization failed");
    mu = lu.solve(e);
  } else {
    Eigen::BiCGSTAB<Eigen::SparseMatrix<double>> it;
    it.setTolerance(1e-13);
    it.setMaxIterations(200000);
    it.compute(At);
    mu = it.solve(e);
    if (it.info() != Eigen::Success)
      throw NumericError("transpose iterative solve did not converge");
  }

  for (int64_t r = 0; r < m; ++r) {
    uint32_t lo = nbr_off_[size_t(r)], hi = nbr_off_[size_t(r) + 1];
    double w = mu[r] / double(hi - lo);
    for (uint32_t e2 = lo; e2 < hi; ++e2) {
      int32_t j = nbr_[e2];
      if (row_of_[size_t(j)] < 0) nu[size_t(j)] += w;
    }
  }
  double total = 0.0;
  for (double p : nu) total += p;
  if (std::abs(total - 1.0) > 1e-9)
    throw NumericError("exit distribution mass " + std::to_string(total));
  return nu;
}

// ===== ball-level conveniences =====

GreenTable green(const GraphFamily& g, int n, const Vertex& z) {
  auto b = ball(g, origin(), n);
  if (!b->contains(z))
    throw DomainError("green target outside B(" + std::to_string(n) +
                      "): " + format_vertex(z));
  DirichletSystem sys = DirichletSystem::stopped_ball(b);
  GreenTable t;
  t.n = n;
  t.z = z;
  t.domain = b;
  t.values = sys.green_column(z);
  return t;
}

DirichletSolution expected_exit_time_exact(const GraphFamily& g, int n) {
  if (n < 1) throw DomainError("exit times need n >= 1");
  DirichletSystem sys = DirichletSystem::stopped_ball(ball(g, origin(), n));
  std::vector<double> rhs(size_t(sys.size()), -1.0), bnd(size_t(sys.size()), 0.0);
  return sys.solve(rhs, bnd);
}

HarnackResult harnack_ratio(const GraphFamily& g, const Vertex& x, int n,
                            int samples, uint64_t master_seed) {
  if (n < 0) throw DomainError("harnack radius must be >= 0");
  if (samples < 1) throw DomainError("harnack needs at least one sample");
  auto b = ball(g, x, 2 * n);
  DirichletSystem sys = DirichletSystem::stopped_ball(b);

  std::vector<int32_t> inner; // B_x(n) inside the 2n-domain
  for (size_t i = 0; i < b->members.size(); ++i)
    if (b->dist[i] <= n) inner.push_back(int32_t(i));

  std::vector<double> rhs(size_t(sys.size()), 0.0), bnd(size_t(sys.size()), 0.0);
  HarnackResult out;
  for (int s = 0; s < samples; ++s) {
    RngStream rng = RngStream::from(master_seed, uint64_t(s));
    for (size_t i = 0; i < size_t(sys.size()); ++i)
      if (!sys.is_interior(sys.verts()[i])) bnd[i] = rng.uniform01();
    DirichletSolution h = sys.solve(rhs, bnd);
    double lo = h.values[size_t(inner[0])], hi = lo;
    for (int32_t i : inner) {
      lo = std::min(lo, h.values[size_t(i)]);
      hi = std::max(hi, h.values[size_t(i)]);
    }
    if (lo <= 0.0) {
      ++out.samples_excluded;
      continue;
    }
    out.max_ratio = std::max(out.max_ratio, hi / lo);
    ++out.samples_used;
  }
  return out;
}

std::vector<DiagonalGreenRow> diagonal_green_bound_check(const GraphFamily& g,
                                                         int n) {
  auto b = ball(g, origin(), n);
  DirichletSystem sys = DirichletSystem::stopped_ball(b);
  std::vector<int> dists = distances_to_inner_boundary(*b);
  std::vector<DiagonalGreenRow> rows;
  rows.reserve(b->members.size());
  for (size_t i = 0; i < b->members.size(); ++i) {
    DiagonalGreenRow row;
    row.z = b->members[i];
    if (!b->inner_bdy[i]) {
      row.g_zz = sys.green_column(row.z)[i];
      row.dist_boundary = dists[i];
    }
    rows.push_back(row);
  }
  return rows;
}

} // namespace sg
