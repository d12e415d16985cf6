#include "celdyn/fock_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "celdyn/errors.hpp"
#include "celdyn/moment_ode.hpp"
#include "celdyn/rk4.hpp"

namespace celdyn {

namespace {

using Triplet = Eigen::Triplet<std::complex<double>>;

void check_cutoffs(const FockCutoffs& c) {
  if (c.n_max_a < 1) throw ValidationError("n_max_a", "cutoff must be >= 1");
  if (c.n_max_b < 1) throw ValidationError("n_max_b", "cutoff must be >= 1");
}

SparseOperator lowering(const FockCutoffs& c, bool mode_a) {
  std::vector<Triplet> entries;
  for (int na = 0; na <= c.n_max_a; ++na) {
    for (int nb = 0; nb <= c.n_max_b; ++nb) {
      const int n = mode_a ? na : nb;
      if (n == 0) continue;
      const int row = mode_a ? c.index(na - 1, nb) : c.index(na, nb - 1);
      entries.emplace_back(row, c.index(na, nb), std::sqrt(static_cast<double>(n)));
    }
  }
  SparseOperator op(c.dimension(), c.dimension());
  op.setFromTriplets(entries.begin(), entries.end());
  return op;
}

std::complex<double> trace_product(const SparseOperator& op, const DenseMatrix& rho) {
  std::complex<double> acc = 0.0;
  for (int k = 0; k < op.outerSize(); ++k) {
    for (SparseOperator::InnerIterator it(op, k); it; ++it) {
      acc += it.value() * rho(it.col(), it.row());
    }
  }
  return acc;
}

}  // namespace

TruncatedState TruncatedState::vacuum(const FockCutoffs& c) { return fock(c, 0, 0); }

TruncatedState TruncatedState::fock(const FockCutoffs& c, int n_a, int n_b) {
  check_cutoffs(c);
  if (n_a < 0 || n_a > c.n_max_a || n_b < 0 || n_b > c.n_max_b)
    throw ValidationError("fock", "occupation outside the truncated basis");
  TruncatedState s;
  s.cutoffs = c;
  s.rho = DenseMatrix::Zero(c.dimension(), c.dimension());
  s.rho(c.index(n_a, n_b), c.index(n_a, n_b)) = 1.0;
  return s;
}

double TruncatedState::trace() const { return rho.trace().real(); }

double TruncatedState::hermiticity_error() const {
  return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

double TruncatedState::tail_occupancy() const {
  double tail = 0.0;
  for (int na = 0; na <= cutoffs.n_max_a; ++na) {
    for (int nb = 0; nb <= cutoffs.n_max_b; ++nb) {
      if (na == cutoffs.n_max_a || nb == cutoffs.n_max_b) {
        const int i = cutoffs.index(na, nb);
        tail += rho(i, i).real();
      }
    }
  }
  return tail;
}

LadderOperators::LadderOperators(const FockCutoffs& c) : cutoffs(c) {
  check_cutoffs(c);
  a = lowering(c, true);
  b = lowering(c, false);
  a_dag = a.adjoint();
  b_dag = b.adjoint();
  n_a = a_dag * a;
  n_b = b_dag * b;
  aa_dag = a * a_dag;
  ab = a * b;
  a_sq = a * a;
  b_sq = b * b;
  a_dag_b = a_dag * b;
}

RowShift RowShift::identity(int dim) {
  RowShift r;
  r.src.resize(dim);
  r.w.assign(dim, 1.0);
  for (int i = 0; i < dim; ++i) r.src[i] = i;
  return r;
}

RowShift RowShift::from(const SparseOperator& op) {
  const Eigen::SparseMatrix<std::complex<double>, Eigen::RowMajor> rows = op;
  RowShift r;
  r.src.assign(rows.rows(), -1);
  r.w.assign(rows.rows(), 0.0);
  for (int i = 0; i < rows.outerSize(); ++i) {
    for (decltype(rows)::InnerIterator it(rows, i); it; ++it) {
      if (it.value() == 0.0) continue;
      if (r.src[i] >= 0) throw std::invalid_argument("operator row has several entries");
      r.src[i] = static_cast<int>(it.col());
      r.w[i] = it.value().real();
    }
  }
  return r;
}

Liouvillian::Rates Liouvillian::rates(const SystemParams& p) {
  const ReducedParams rp = derive(p);
  return {p.A * rp.C / rp.B, p.A * rp.D / rp.B, p.A * rp.E / rp.B,
          p.A * rp.pair_weight() / rp.B};
}

Liouvillian::Liouvillian(const SystemParams& p, const FockCutoffs& c) : ops_(c) {
  const auto [g, d, e, f] = rates(p);
  const double loss_b = g + p.kappa;
  const int dim = c.dimension();

  // K splits into a real diagonal plus pair creation and pair annihilation.
  const SparseOperator diag = (-p.kappa / 2.0) * ops_.n_a + (-g / 2.0) * ops_.aa_dag +
                              (-loss_b / 2.0) * ops_.n_b + (d / 2.0) * (ops_.aa_dag - ops_.n_b);
  RowShift k_diag = RowShift::identity(dim);
  for (int i = 0; i < dim; ++i) k_diag.w[i] = diag.coeff(i, i).real();
  const RowShift id = RowShift::identity(dim);
  const RowShift create = RowShift::from(ops_.ab.adjoint());
  const RowShift annihilate = RowShift::from(ops_.ab);
  const RowShift a = RowShift::from(ops_.a);
  const RowShift a_dag = RowShift::from(ops_.a_dag);
  const RowShift b = RowShift::from(ops_.b);

  const auto add = [&](double coef, const RowShift& x, const RowShift& y) {
    if (coef != 0.0) terms_.push_back({coef, x, y});
  };
  add(1.0, k_diag, id);
  add(1.0, id, k_diag);
  add((e + f) / 2.0, create, id);
  add((e + f) / 2.0, id, create);
  add((e - f) / 2.0, annihilate, id);
  add((e - f) / 2.0, id, annihilate);
  add(p.kappa, a, a);
  add(g - d, a_dag, a_dag);
  add(loss_b + d, b, b);
  add(-e, a_dag, b);
  add(-e, b, a_dag);
}

DenseMatrix Liouvillian::apply(const DenseMatrix& rho) const {
  const Eigen::Index dim = rho.rows();
  DenseMatrix out = DenseMatrix::Zero(dim, dim);
  for (const Term& term : terms_) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      const int sj = term.y.src[j];
      if (sj < 0) continue;
      const double cy = term.c * term.y.w[j];
      const std::complex<double>* in = rho.col(sj).data();
      std::complex<double>* dst = out.col(j).data();
      for (Eigen::Index i = 0; i < dim; ++i) {
        const int si = term.x.src[i];
        if (si >= 0) dst[i] += (cy * term.x.w[i]) * in[si];
      }
    }
  }
  return out;
}

SparseOperator Liouvillian::restricted(std::span<const int> elements) const {
  const int dim = ops_.cutoffs.dimension();
  std::vector<int> position(static_cast<std::size_t>(dim) * dim, -1);
  for (std::size_t k = 0; k < elements.size(); ++k) position[elements[k]] = static_cast<int>(k);

  std::vector<Triplet> entries;
  for (const Term& term : terms_) {
    for (std::size_t k = 0; k < elements.size(); ++k) {
      const int i = elements[k] % dim;
      const int j = elements[k] / dim;
      const int si = term.x.src[i];
      const int sj = term.y.src[j];
      if (si < 0 || sj < 0) continue;
      const int from = position[si + sj * dim];
      if (from < 0) throw std::logic_error("element set is not closed under the generator");
      entries.emplace_back(static_cast<int>(k), from, term.c * term.x.w[i] * term.y.w[j]);
    }
  }
  SparseOperator out(static_cast<Eigen::Index>(elements.size()),
                     static_cast<Eigen::Index>(elements.size()));
  out.setFromTriplets(entries.begin(), entries.end());
  return out;
}

std::vector<int> pair_sector(const FockCutoffs& c) {
  const int dim = c.dimension();
  std::vector<int> out;
  for (int ma = 0; ma <= c.n_max_a; ++ma)
    for (int mb = 0; mb <= c.n_max_b; ++mb)
      for (int na = 0; na <= c.n_max_a; ++na)
        for (int nb = 0; nb <= c.n_max_b; ++nb)
          if (na - nb == ma - mb) out.push_back(c.index(na, nb) + c.index(ma, mb) * dim);
  return out;
}

DenseMatrix liouvillian_apply(const TruncatedState& s, const SystemParams& p) {
  return Liouvillian(p, s.cutoffs).apply(s.rho);
}

FockExpectations expectations(const TruncatedState& s, const LadderOperators& ops) {
  FockExpectations e;
  e.n_a = trace_product(ops.n_a, s.rho);
  e.n_b = trace_product(ops.n_b, s.rho);
  e.ab = trace_product(ops.ab, s.rho);
  e.a_sq = trace_product(ops.a_sq, s.rho);
  e.b_sq = trace_product(ops.b_sq, s.rho);
  e.a = trace_product(ops.a, s.rho);
  e.b = trace_product(ops.b, s.rho);
  e.a_dag_b = trace_product(ops.a_dag_b, s.rho);
  return e;
}

FockExpectations expectations(const TruncatedState& s) {
  return expectations(s, LadderOperators(s.cutoffs));
}

std::vector<FockRecord> evolve(const SystemParams& p, std::span<const double> t_grid, double dt,
                               const FockOptions& opts) {
  check_time_grid(t_grid);
  check_step(drift_diffusion(p), dt);

  const Liouvillian liouvillian(p, opts.cutoffs);
  const std::vector<int> sector = pair_sector(opts.cutoffs);
  const SparseOperator generator = liouvillian.restricted(sector);
  const auto rhs = [&](const Eigen::VectorXcd& x) -> Eigen::VectorXcd { return generator * x; };

  TruncatedState state = TruncatedState::vacuum(opts.cutoffs);
  Eigen::VectorXcd x = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(sector.size()));
  x[0] = 1.0;  // |0,0><0,0| is the first sector element
  std::vector<FockRecord> out;
  out.reserve(t_grid.size());

  bool limited = false;
  const auto record = [&] {
    const FockExpectations e = expectations(state, liouvillian.operators());
    FockRecord r;
    r.t = state.t;
    r.n_a = e.n_a.real();
    r.n_b = e.n_b.real();
    r.ab = e.ab;
    r.trace = state.trace();
    r.tail = state.tail_occupancy();
    r.hermiticity = state.hermiticity_error();
    if (r.tail > opts.tail_tolerance) {
      if (opts.throw_on_cutoff) {
        std::ostringstream msg;
        msg << "tail occupancy " << r.tail << " exceeds " << opts.tail_tolerance
            << " at t=" << r.t << "; raise the Fock cutoffs";
        throw CutoffExceeded(msg.str());
      }
      limited = true;
    }
    r.cutoff_limited = limited;
    out.push_back(r);
  };

  record();
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    const double span = t_grid[i] - t_grid[i - 1];
    const auto n = std::max(1L, static_cast<long>(std::ceil(span / dt * (1.0 - 1e-12))));
    const double h = span / static_cast<double>(n);
    for (long k = 0; k < n; ++k) rk4_step(x, h, rhs);
    for (std::size_t k = 0; k < sector.size(); ++k) state.rho(sector[k]) = x[k];
    state.t = t_grid[i];
    record();
  }
  return out;
}

double min_eigenvalue(const TruncatedState& s) {
  const DenseMatrix herm = 0.5 * (s.rho + s.rho.adjoint());
  Eigen::SelfAdjointEigenSolver<DenseMatrix> solver(herm, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

}  // namespace celdyn
