#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "celdyn/params.hpp"

namespace celdyn {

using DenseMatrix = Eigen::MatrixXcd;
using SparseOperator = Eigen::SparseMatrix<std::complex<double>>;

struct FockCutoffs {
  int n_max_a = 12;
  int n_max_b = 12;

  int dimension() const { return (n_max_a + 1) * (n_max_b + 1); }
  /// Basis index of |n_a, n_b>.
  int index(int n_a, int n_b) const { return n_a * (n_max_b + 1) + n_b; }
};

/// Two-mode density matrix on a truncated Fock basis.
struct TruncatedState {
  FockCutoffs cutoffs;
  DenseMatrix rho;
  double t = 0.0;

  static TruncatedState vacuum(const FockCutoffs& c);
  static TruncatedState fock(const FockCutoffs& c, int n_a, int n_b);

  double trace() const;
  /// max |rho - rho^dagger| over elements.
  double hermiticity_error() const;
  /// Population in the top Fock level of either mode.
  double tail_occupancy() const;
};

/// Ladder operators a, b (and products) on the truncated two-mode basis.
struct LadderOperators {
  explicit LadderOperators(const FockCutoffs& c);

  FockCutoffs cutoffs;
  SparseOperator a;
  SparseOperator b;
  SparseOperator a_dag;
  SparseOperator b_dag;
  SparseOperator n_a;   ///< a^dagger a
  SparseOperator n_b;   ///< b^dagger b
  SparseOperator aa_dag;  ///< a a^dagger (truncated)
  SparseOperator ab;
  SparseOperator a_sq;
  SparseOperator b_sq;
  SparseOperator a_dag_b;
};

/// Operator with at most one nonzero per row: row i picks column src[i]
/// (or nothing when src[i] < 0) with weight w[i]. Every operator in the
/// generator below has this form.
struct RowShift {
  std::vector<int> src;
  std::vector<double> w;

  static RowShift identity(int dim);
  /// Throws std::invalid_argument if a row holds more than one entry.
  static RowShift from(const SparseOperator& op);
};

/// Right-hand side of the phase-averaged reduced master equation,
/// written as d rho/dt = K rho + rho K^dagger + sum_j c_j X_j rho Y_j^dagger.
class Liouvillian {
 public:
  Liouvillian(const SystemParams& p, const FockCutoffs& c);

  DenseMatrix apply(const DenseMatrix& rho) const;

  const LadderOperators& operators() const { return ops_; }

  /// Matrix of the generator acting on the listed elements of rho
  /// (column-major flat indices). The list must be closed under the
  /// generator; throws std::logic_error otherwise.
  SparseOperator restricted(std::span<const int> elements) const;

  /// Rates of the generator: K = -(kappa/2) a^dag a - (g/2) a a^dag
  /// - ((g + kappa)/2) b^dag b + (d/2)(a a^dag - b^dag b) + (e/2)(b^dag a^dag + a b)
  /// + (f/2)(b^dag a^dag - a b), jumps kappa a.a^dag, (g - d) a^dag.a,
  /// (g + kappa + d) b.b^dag and -e (a^dag.b^dag + b.a).
  struct Rates {
    double g, d, e, f;
  };
  static Rates rates(const SystemParams& p);

 private:
  struct Term {
    double c;
    RowShift x;
    RowShift y;
  };

  LadderOperators ops_;
  std::vector<Term> terms_;  // c X rho Y^dagger
};

/// Flat indices of the elements |n_a, n_b><m_a, m_b| with n_a - n_b = m_a - m_b.
/// Every term of the generator preserves this sector and the vacuum lies in
/// it, so evolution from the vacuum never leaves it.
std::vector<int> pair_sector(const FockCutoffs& c);

DenseMatrix liouvillian_apply(const TruncatedState& s, const SystemParams& p);

struct FockExpectations {
  std::complex<double> n_a;
  std::complex<double> n_b;
  std::complex<double> ab;
  std::complex<double> a_sq;
  std::complex<double> b_sq;
  std::complex<double> a;
  std::complex<double> b;
  std::complex<double> a_dag_b;
};

FockExpectations expectations(const TruncatedState& s);
FockExpectations expectations(const TruncatedState& s, const LadderOperators& ops);

struct FockRecord {
  double t = 0.0;
  double n_a = 0.0;
  double n_b = 0.0;
  std::complex<double> ab;
  double trace = 1.0;
  double tail = 0.0;
  double hermiticity = 0.0;
  bool cutoff_limited = false;

  /// 1 + <a^dag a> + <b^dag b> -/+ 2 Re<ab>
  double dc_minus_sq() const { return 1.0 + n_a + n_b - 2.0 * ab.real(); }
  double dc_plus_sq() const { return 1.0 + n_a + n_b + 2.0 * ab.real(); }
};

struct FockOptions {
  FockCutoffs cutoffs;
  double tail_tolerance = 1e-6;
  /// Throw CutoffExceeded when the tail grows past tolerance; otherwise keep
  /// going and flag the records.
  bool throw_on_cutoff = true;
};

/// Fixed-step RK4 evolution from the two-mode vacuum, carried out on the
/// pair sector only. Each grid interval is split into equal steps no larger
/// than dt.
std::vector<FockRecord> evolve(const SystemParams& p, std::span<const double> t_grid, double dt,
                               const FockOptions& opts = {});

/// Smallest eigenvalue of rho; positivity is not guaranteed by the equation.
double min_eigenvalue(const TruncatedState& s);

}  // namespace celdyn
