#pragma once
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "l2morse/calculus.hpp"
#include "l2morse/morse.hpp"

namespace l2morse {

// One estimated value with the knobs that produced it.
struct BettiEntry {
    int degree = 0;
    double value = 0.0;
    std::string method; // floquet | finite_cover | heat_limit
    double tolerance = 0.0;
    int samples = 0;
};

struct BettiReport {
    std::vector<BettiEntry> entries;
    std::vector<std::string> notes;
    std::vector<double> values() const;
};

// Phase-space fiber of an invariant operator in the orthonormal basis: the
// deck offset o contributes on(block_o) * exp(i <theta, o>). Lattice deck
// groups only.
Eigen::MatrixXcd floquet_fiber(const WindowedOperator& A,
                               const std::vector<double>& theta);

// Kernel dimensions of the fiber Laplacians d(theta)^H d(theta) +
// d(theta) d(theta)^H at one phase. Eigenvalues below ker_tol * max(1,
// lam_max) count as kernel; any eigenvalue within 10x above the cutoff
// throws (ambiguous sample).
std::vector<int> floquet_kernel_dims(const DifferentialComplex& D,
                                     const std::vector<double>& theta,
                                     double ker_tol);

// Generic fiber kernel dimension, minimized over pseudo-random phases.
// Requires a lattice deck group and samples >= 16; flags any sample whose
// kernel dimension exceeds the minimum.
BettiReport floquet_betti(const DifferentialComplex& D, int samples,
                          double ker_tol, std::uint64_t seed);

// Numerical ranks of the full finite cover (cyclic deck group): value_k =
// (m_k N - rank_k - rank_{k-1}) / N. A singular value within a factor 10 of
// rank_tol * sigma_max on either side throws with a spectrum excerpt.
BettiReport finite_cover_betti(const DifferentialComplex& D, double rank_tol);

// Folner-averaged heat traces per degree at heat times s_fixed * t for t in
// the increasing t_sequence, with a geometric-tail extrapolation over the
// last three values (exact when those times are equally spaced). Averages
// must be nonincreasing in the heat time up to a slack of 8 * eps * m_k;
// a violation throws (the calculus tolerance is too loose).
struct HeatBettiReport {
    std::vector<double> heat_times;
    std::vector<std::vector<double>> averages; // [degree][time index]
    std::vector<double> extrapolated;          // geometric-tail fit
    std::vector<double> raw_last;              // last raw average
    int folner_k = 0;
    double eps = 0.0;
    BettiReport report() const;
};
HeatBettiReport heat_betti(const DifferentialComplex& D, double s_fixed,
                           const std::vector<double>& t_sequence, int folner_k,
                           const CalculusOptions& opts);

// Kernel dimensions (lattice: generic fiber; cyclic: finite-cover values) of
// the deformed Laplacians at each t in t_list, compared against t = 0. The
// same phase set is reused across t so the comparison is exact.
struct InvarianceReport {
    std::vector<double> t_values;              // leading 0, then t_list
    std::vector<std::vector<double>> values;   // [t index][degree]
    bool pass = false;
};
InvarianceReport invariance_check(const DifferentialComplex& D,
                                  const CellFunction& f,
                                  const std::vector<double>& t_list,
                                  int samples, double ker_tol,
                                  std::uint64_t seed);

// Throws unless sum_k (-1)^k betti_k equals chi within tol.
void euler_poincare_check(const std::vector<double>& betti, double chi,
                          double tol);

// One verdict row. The count stanza compares alternating critical-count
// averages against alternating oracle values (top degree two-sided against
// (-1)^n chi); the heat stanza checks positivity of the alternating heat
// traces of the t-deformed complex at heat time s (top degree two-sided:
// the supertrace is the Euler characteristic at every s).
struct LedgerRow {
    std::string stanza; // "count" or "heat"
    int k = 0;
    double lhs_avg = 0.0;
    double rhs = 0.0;
    bool verdict = false;
    int folner_k = 0;
    double defect = 0.0; // lhs_avg - rhs
};
struct MorseLedger {
    std::vector<LedgerRow> rows;
    bool all_pass = false;
};
MorseLedger morse_inequality_eval(const DifferentialComplex& D,
                                  const DiscreteMorseData& morse,
                                  const std::vector<double>& betti, double s,
                                  double t, int folner_kmin, int folner_kmax,
                                  double tol, const CalculusOptions& opts);

} // namespace l2morse
