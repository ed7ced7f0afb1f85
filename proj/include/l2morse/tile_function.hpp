#pragma once
#include <map>
#include <optional>
#include <vector>

#include "l2morse/group.hpp"

namespace l2morse {

// Real-valued function on deck group elements, materialized on a finite window.
//
// Two flavors:
//  * total:   a finite map plus a default value; defined on all of G
//             (e.g. the constant function, or a finitely supported one).
//  * partial: a finite map only; defined exactly on the stored window
//             (e.g. per-tile traces computed inside an exactness margin).
// Averages over a Folner box require the box to lie inside the domain; for a
// partial function that is the "window too small" error path.
class TileFunction {
public:
    TileFunction() = default;

    static TileFunction constant(double v) {
        TileFunction f;
        f.default_ = v;
        return f;
    }
    static TileFunction windowed(std::map<GroupElement, double> vals) {
        TileFunction f;
        f.values_ = std::move(vals);
        return f;
    }
    static TileFunction total(std::map<GroupElement, double> vals, double def) {
        TileFunction f;
        f.values_ = std::move(vals);
        f.default_ = def;
        return f;
    }

    bool is_total() const { return default_.has_value(); }
    bool defined_at(const GroupElement& g) const {
        return default_.has_value() || values_.count(g) > 0;
    }
    double at(const GroupElement& g) const; // throws outside a partial window
    void set(const GroupElement& g, double v) { values_[g] = v; }

    const std::map<GroupElement, double>& stored() const { return values_; }
    std::optional<double> default_value() const { return default_; }

    // Largest box radius fully contained in the domain (INT_MAX-ish for total).
    int covered_radius(const GroupModel& G) const;

    // Pointwise combinations; domain = intersection of domains.
    friend TileFunction operator-(const TileFunction& a, const TileFunction& b);
    friend TileFunction operator+(const TileFunction& a, const TileFunction& b);
    TileFunction scaled(double c) const;

    // sup |phi| over the stored window (plus default if total).
    double sup_abs() const;

private:
    std::map<GroupElement, double> values_;
    std::optional<double> default_;
};

// Mean of phi over the Folner box F_k, summing in lexicographic member order
// (the canonical order — fixed so reruns are bit-identical). Throws
// "window too small" naming the required radius if F_k escapes phi's domain.
double folner_average(const GroupModel& G, const TileFunction& phi, int k);

// Least-squares fit of log|y| = log C - p*log k over the given (k, y) points,
// skipping |y| below floor. Returns {C, p, r2}; degenerate inputs give p=0, r2=1.
struct PowerFit {
    double C = 0.0;
    double p = 0.0;
    double r2 = 1.0;
    int used = 0;
};
PowerFit fit_power_decay(const std::vector<std::pair<int, double>>& pts,
                         double floor = 1e-300);

// Verdict of the averaged comparison "phi >= psi mod the averaging ideal".
struct IdealCompareReport {
    bool pass = false;
    std::vector<int> ks;
    std::vector<double> averages; // of phi - psi over F_k
    PowerFit boundary_decay;      // fit of |avg_k - avg_last| ~ C k^-p
    double tol = 0.0;
};

// Operational test of the preorder: every boxed average of (phi - psi) must be
// >= -tol and the largest-k average must be >= -tol/2 (the boundary term must
// have died down to half the budget by the end of the range).
IdealCompareReport geq_mod_ideal(const GroupModel& G, const TileFunction& phi,
                                 const TileFunction& psi, int k_min, int k_max,
                                 double tol);

// Check that a finitely supported phi averages to zero at the exact rate
// |avg| <= sup|phi| * |supp| / |F_k|. Requires an honestly finite support:
// a total function on an infinite group must have default 0.
struct VanishingReport {
    bool pass = false;
    std::vector<int> ks;
    std::vector<double> averages;
    std::vector<double> bounds;
};
VanishingReport finitely_supported_vanishing_check(const GroupModel& G,
                                                   const TileFunction& phi,
                                                   int k_min, int k_max);

} // namespace l2morse
