#include "l2morse/tile_function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace l2morse {

double TileFunction::at(const GroupElement& g) const {
    auto it = values_.find(g);
    if (it != values_.end()) return it->second;
    if (default_) return *default_;
    throw std::out_of_range("tile function: evaluated outside its window at " +
                            to_string(g));
}

int TileFunction::covered_radius(const GroupModel& G) const {
    if (default_) return std::numeric_limits<int>::max() / 4;
    if (G.kind() == GroupModel::Kind::Cyclic) {
        // covered iff every residue is present
        for (std::int64_t v = 0; v < G.order(); ++v)
            if (!values_.count(GroupElement{{v}})) return -1;
        return std::numeric_limits<int>::max() / 4;
    }
    int r = -1;
    while (true) {
        for (const auto& g : G.box_elements(r + 1))
            if (!values_.count(g)) return r;
        ++r;
    }
}

static TileFunction combine(const TileFunction& a, const TileFunction& b, double sb) {
    std::map<GroupElement, double> vals;
    for (const auto& [g, v] : a.stored())
        if (b.defined_at(g)) vals[g] = v + sb * b.at(g);
    for (const auto& [g, v] : b.stored())
        if (a.defined_at(g) && !vals.count(g)) vals[g] = a.at(g) + sb * v;
    if (a.default_value() && b.default_value())
        return TileFunction::total(std::move(vals),
                                   *a.default_value() + sb * *b.default_value());
    return TileFunction::windowed(std::move(vals));
}

TileFunction operator-(const TileFunction& a, const TileFunction& b) {
    return combine(a, b, -1.0);
}
TileFunction operator+(const TileFunction& a, const TileFunction& b) {
    return combine(a, b, 1.0);
}

TileFunction TileFunction::scaled(double c) const {
    TileFunction out;
    out.values_ = values_;
    for (auto& [g, v] : out.values_) v *= c;
    if (default_) out.default_ = *default_ * c;
    return out;
}

double TileFunction::sup_abs() const {
    double s = default_ ? std::fabs(*default_) : 0.0;
    for (const auto& [g, v] : values_) s = std::max(s, std::fabs(v));
    return s;
}

double folner_average(const GroupModel& G, const TileFunction& phi, int k) {
    FolnerBox F = G.folner_box(k);
    double sum = 0.0;
    for (const auto& g : F.members) {
        if (!phi.defined_at(g))
            throw std::runtime_error(
                "folner_average: window too small, function must cover box radius " +
                std::to_string(k) + " (missing tile " + to_string(g) + ")");
        sum += phi.at(g);
    }
    return sum / static_cast<double>(F.members.size());
}

PowerFit fit_power_decay(const std::vector<std::pair<int, double>>& pts, double floor) {
    PowerFit fit;
    std::vector<double> X, Y;
    for (const auto& [k, y] : pts) {
        if (k <= 0) continue;
        double a = std::fabs(y);
        if (a < floor) continue;
        X.push_back(std::log(static_cast<double>(k)));
        Y.push_back(std::log(a));
    }
    fit.used = static_cast<int>(X.size());
    if (X.size() < 2) return fit; // degenerate: p=0, r2=1
    const double n = static_cast<double>(X.size());
    double mx = 0, my = 0;
    for (size_t i = 0; i < X.size(); ++i) {
        mx += X[i];
        my += Y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < X.size(); ++i) {
        sxx += (X[i] - mx) * (X[i] - mx);
        sxy += (X[i] - mx) * (Y[i] - my);
        syy += (Y[i] - my) * (Y[i] - my);
    }
    if (sxx == 0.0) return fit;
    const double slope = sxy / sxx;
    fit.p = -slope;
    fit.C = std::exp(my - slope * mx);
    fit.r2 = (syy == 0.0) ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

IdealCompareReport geq_mod_ideal(const GroupModel& G, const TileFunction& phi,
                                 const TileFunction& psi, int k_min, int k_max,
                                 double tol) {
    if (k_min < 0 || k_max < k_min)
        throw std::invalid_argument("geq_mod_ideal: bad Folner range");
    IdealCompareReport rep;
    rep.tol = tol;
    const TileFunction diff = phi - psi;
    for (int k = k_min; k <= k_max; ++k) {
        rep.ks.push_back(k);
        rep.averages.push_back(folner_average(G, diff, k));
    }
    bool ok = true;
    for (double a : rep.averages)
        if (a < -tol) ok = false;
    const double last = rep.averages.back();
    if (last < -tol / 2.0) ok = false;
    rep.pass = ok;
    std::vector<std::pair<int, double>> dev;
    for (size_t i = 0; i + 1 < rep.averages.size(); ++i)
        dev.emplace_back(rep.ks[i], rep.averages[i] - last);
    rep.boundary_decay = fit_power_decay(dev);
    return rep;
}

VanishingReport finitely_supported_vanishing_check(const GroupModel& G,
                                                   const TileFunction& phi,
                                                   int k_min, int k_max) {
    if (G.kind() == GroupModel::Kind::Lattice && phi.is_total() &&
        *phi.default_value() != 0.0)
        throw std::invalid_argument(
            "finitely_supported_vanishing_check: function is not finitely supported "
            "(nonzero default on an infinite group)");
    if (!phi.is_total() && G.kind() == GroupModel::Kind::Lattice)
        throw std::invalid_argument(
            "finitely_supported_vanishing_check: support unknown outside window "
            "(partial function on an infinite group); give it an explicit 0 default");
    // support = stored nonzero entries (default is 0 by the check above)
    std::uint64_t supp = 0;
    double sup = 0.0;
    for (const auto& [g, v] : phi.stored()) {
        if (v != 0.0) {
            ++supp;
            sup = std::max(sup, std::fabs(v));
        }
    }
    VanishingReport rep;
    bool ok = true;
    for (int k = k_min; k <= k_max; ++k) {
        const double avg = folner_average(G, phi, k);
        const double bound =
            sup * static_cast<double>(supp) / static_cast<double>(G.folner_size(k));
        rep.ks.push_back(k);
        rep.averages.push_back(avg);
        rep.bounds.push_back(bound);
        if (std::fabs(avg) > bound) ok = false;
    }
    rep.pass = ok;
    return rep;
}

} // namespace l2morse
