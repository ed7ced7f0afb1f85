#include "l2morse/betti.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "l2morse/rng.hpp"
#include "l2morse/util.hpp"

namespace l2morse {

std::vector<double> BettiReport::values() const {
    std::vector<double> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.value);
    return out;
}

void euler_poincare_check(const std::vector<double>& betti, double chi, double tol) {
    double alt = 0.0;
    for (std::size_t k = 0; k < betti.size(); ++k)
        alt += (k % 2 ? -betti[k] : betti[k]);
    if (std::abs(alt - chi) > tol)
        throw std::runtime_error(
            "alternating sum of the estimated values is " + fmt17(alt) +
            " but the base Euler characteristic is " + fmt17(chi) +
            " (tolerance " + fmt17(tol) + ")");
}

// ---------------------------------------------------------------------------
// Floquet fibers

Eigen::MatrixXcd floquet_fiber(const WindowedOperator& A,
                               const std::vector<double>& theta) {
    if (!A.is_invariant())
        throw std::runtime_error("fiber: only invariant operators decompose over phases");
    const GroupModel& G = A.cover()->group();
    if (!G.is_lattice())
        throw std::runtime_error(
            "fiber: phase decomposition needs the free deck group; use the "
            "finite-cover rank method for cyclic groups");
    if (static_cast<int>(theta.size()) != G.rank())
        throw std::runtime_error("fiber: phase needs one angle per lattice rank");

    const auto& wt = A.cover()->base().weights(A.tgt_deg());
    const auto& ws = A.cover()->base().weights(A.src_deg());
    Eigen::MatrixXcd F = Eigen::MatrixXcd::Zero(A.rows_per_tile(), A.cols_per_tile());
    const std::complex<double> I(0.0, 1.0);
    for (const auto& [o, M] : A.offset_blocks()) {
        double dot = 0.0;
        for (std::size_t i = 0; i < o.c.size(); ++i)
            dot += theta[i] * static_cast<double>(o.c[i]);
        std::complex<double> phase = std::exp(I * dot);
        for (Eigen::Index c = 0; c < M.cols(); ++c)
            for (Eigen::Index r = 0; r < M.rows(); ++r)
                if (M(r, c) != 0.0)
                    F(r, c) += phase * M(r, c) *
                               std::sqrt(wt[static_cast<std::size_t>(r)] /
                                         ws[static_cast<std::size_t>(c)]);
    }
    return F;
}

namespace {

// kernel dimension of one Hermitian PSD fiber; eigenvalues within a decade
// above the cutoff make the sample unusable
int kernel_dim_of(const Eigen::MatrixXcd& H, double ker_tol, int degree) {
    if (H.rows() == 0) return 0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("fiber: eigensolver failed");
    const auto& ev = es.eigenvalues();
    double lam_max = std::max(1.0, ev.maxCoeff());
    double tau = ker_tol * lam_max;
    int dim = 0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        double lam = std::max(0.0, ev(i));
        if (lam < tau) {
            ++dim;
        } else if (lam < 10.0 * tau) {
            throw std::runtime_error(
                "fiber: degenerate sample at degree " + std::to_string(degree) +
                ": eigenvalue " + fmt17(lam) + " lies in the ambiguity band [" +
                fmt17(tau) + ", " + fmt17(10.0 * tau) +
                "); tighten ker_tol or resample");
        }
    }
    return dim;
}

} // namespace

std::vector<int> floquet_kernel_dims(const DifferentialComplex& D,
                                     const std::vector<double>& theta,
                                     double ker_tol) {
    int n = D.cover->dim();
    std::vector<Eigen::MatrixXcd> B(D.d.size());
    for (std::size_t k = 0; k < D.d.size(); ++k) B[k] = floquet_fiber(D.d[k], theta);
    std::vector<int> dims(static_cast<std::size_t>(n) + 1, 0);
    for (int k = 0; k <= n; ++k) {
        int m = D.cover->tile_cells(k);
        Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(m, m);
        if (k < n) H += B[static_cast<std::size_t>(k)].adjoint() * B[static_cast<std::size_t>(k)];
        if (k > 0)
            H += B[static_cast<std::size_t>(k - 1)] * B[static_cast<std::size_t>(k - 1)].adjoint();
        dims[static_cast<std::size_t>(k)] = kernel_dim_of(H, ker_tol, k);
    }
    return dims;
}

BettiReport floquet_betti(const DifferentialComplex& D, int samples,
                          double ker_tol, std::uint64_t seed) {
    const GroupModel& G = D.cover->group();
    if (!G.is_lattice())
        throw std::runtime_error(
            "floquet_betti: cyclic deck group; use finite_cover_betti");
    if (samples < 16)
        throw std::runtime_error("floquet_betti: needs at least 16 phase samples");

    SplitMix64 rng(seed);
    std::vector<std::vector<double>> phases(static_cast<std::size_t>(samples));
    for (auto& th : phases) {
        th.resize(static_cast<std::size_t>(G.rank()));
        for (auto& v : th) v = rng.next_unit() * 2.0 * std::numbers::pi;
    }

    int n = D.cover->dim();
    std::vector<std::vector<int>> dims(static_cast<std::size_t>(samples));
    std::vector<std::string> errors(static_cast<std::size_t>(samples));
    parallel_for(static_cast<std::size_t>(samples), [&](std::size_t i) {
        try {
            dims[i] = floquet_kernel_dims(D, phases[i], ker_tol);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });
    for (const auto& e : errors)
        if (!e.empty()) throw std::runtime_error(e);

    BettiReport R;
    for (int k = 0; k <= n; ++k) {
        int best = dims[0][static_cast<std::size_t>(k)];
        for (const auto& d : dims) best = std::min(best, d[static_cast<std::size_t>(k)]);
        int off = 0;
        for (const auto& d : dims)
            if (d[static_cast<std::size_t>(k)] != best) ++off;
        if (off > 0)
            R.notes.push_back("degree " + std::to_string(k) + ": " +
                              std::to_string(off) + " of " + std::to_string(samples) +
                              " samples exceeded the generic kernel dimension " +
                              std::to_string(best));
        R.entries.push_back({k, static_cast<double>(best), "floquet", ker_tol, samples});
    }
    euler_poincare_check(R.values(), static_cast<double>(D.cover->base().euler()), 1e-9);
    return R;
}

// ---------------------------------------------------------------------------
// Finite-cover ranks

namespace {

int numerical_rank(const Eigen::MatrixXd& M, double rank_tol, int degree) {
    if (M.rows() == 0 || M.cols() == 0) return 0;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(M);
    const auto& sv = svd.singularValues();
    double smax = sv.size() ? sv(0) : 0.0;
    if (smax == 0.0) return 0;
    double thr = rank_tol * smax;
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        double s = sv(i);
        bool ambiguous = (s > thr && s <= 10.0 * thr) || (s >= 0.1 * thr && s <= thr);
        if (ambiguous) {
            std::ostringstream os;
            os << "finite_cover_betti: rank ambiguity at degree " << degree
               << ": singular value " << fmt17(s) << " sits within a factor 10 of the"
               << " cutoff " << fmt17(thr) << "; spectrum near the cutoff:";
            for (Eigen::Index j = std::max<Eigen::Index>(0, i - 2);
                 j < std::min<Eigen::Index>(sv.size(), i + 3); ++j)
                os << " " << fmt17(sv(j));
            throw std::runtime_error(os.str());
        }
        if (s > thr) ++rank;
    }
    return rank;
}

} // namespace

BettiReport finite_cover_betti(const DifferentialComplex& D, double rank_tol) {
    const GroupModel& G = D.cover->group();
    if (G.is_lattice())
        throw std::runtime_error(
            "finite_cover_betti: the deck group must be finite cyclic; use "
            "floquet_betti for lattices");
    const int N = static_cast<int>(G.order());
    int n = D.cover->dim();
    std::vector<int> rank(D.d.size(), 0);
    for (std::size_t k = 0; k < D.d.size(); ++k)
        rank[k] = numerical_rank(to_dense_on(D.d[k]), rank_tol, static_cast<int>(k));

    BettiReport R;
    for (int k = 0; k <= n; ++k) {
        int total = D.cover->tile_cells(k) * N;
        if (k < n) total -= rank[static_cast<std::size_t>(k)];
        if (k > 0) total -= rank[static_cast<std::size_t>(k - 1)];
        R.entries.push_back(
            {k, static_cast<double>(total) / N, "finite_cover", rank_tol, N});
    }
    euler_poincare_check(R.values(), static_cast<double>(D.cover->base().euler()), 1e-9);
    return R;
}

// ---------------------------------------------------------------------------
// Heat-trace limits

BettiReport HeatBettiReport::report() const {
    BettiReport R;
    for (std::size_t k = 0; k < raw_last.size(); ++k)
        R.entries.push_back({static_cast<int>(k), raw_last[k], "heat_limit", eps,
                             static_cast<int>(heat_times.size())});
    return R;
}

HeatBettiReport heat_betti(const DifferentialComplex& D, double s_fixed,
                           const std::vector<double>& t_sequence, int folner_k,
                           const CalculusOptions& opts) {
    if (t_sequence.empty()) throw std::runtime_error("heat_betti: empty t sequence");
    for (std::size_t i = 1; i < t_sequence.size(); ++i)
        if (!(t_sequence[i] > t_sequence[i - 1]))
            throw std::runtime_error("heat_betti: t sequence must be increasing");
    if (s_fixed < 0.0) throw std::runtime_error("heat_betti: negative heat scale");

    const GroupModel& G = D.cover->group();
    const int n = D.cover->dim();
    HeatBettiReport R;
    R.folner_k = folner_k;
    R.eps = opts.eps;
    for (double t : t_sequence) R.heat_times.push_back(s_fixed * t);
    R.averages.assign(static_cast<std::size_t>(n) + 1, {});

    for (int k = 0; k <= n; ++k) {
        const int m = D.cover->tile_cells(k);
        CalculusOptions ok = opts;
        if (static_cast<std::size_t>(k) < D.lam_bound.size() &&
            D.lam_bound[static_cast<std::size_t>(k)] > 0.0)
            ok.lam_max_override = D.lam_bound[static_cast<std::size_t>(k)];
        WindowedOperator lap = D.laplacian(k);
        auto& avg = R.averages[static_cast<std::size_t>(k)];
        for (double s : R.heat_times) {
            if (s == 0.0) {
                avg.push_back(static_cast<double>(m));
                continue;
            }
            PolyResult pr = poly_calculus(lap, HeatFunction{s}, ok);
            avg.push_back(folner_average(G, pr.op.piecewise_trace(), folner_k));
        }
        const double slack = 8.0 * opts.eps * m + 1e-12;
        for (std::size_t i = 1; i < avg.size(); ++i)
            if (avg[i] > avg[i - 1] + slack)
                throw std::runtime_error(
                    "heat_betti: averages increased from " + fmt17(avg[i - 1]) +
                    " to " + fmt17(avg[i]) + " at degree " + std::to_string(k) +
                    "; the calculus tolerance is too loose for this window");

        double extr = avg.back();
        if (avg.size() >= 3) {
            double a1 = avg[avg.size() - 3], a2 = avg[avg.size() - 2], a3 = avg.back();
            double den = (a3 - a2) - (a2 - a1);
            if (std::abs(den) > 1e-14 * (std::abs(a3) + 1.0))
                extr = a3 - (a3 - a2) * (a3 - a2) / den;
        }
        R.extrapolated.push_back(extr);
        R.raw_last.push_back(avg.back());
    }
    return R;
}

// ---------------------------------------------------------------------------
// Deformation invariance

InvarianceReport invariance_check(const DifferentialComplex& D,
                                  const CellFunction& f,
                                  const std::vector<double>& t_list, int samples,
                                  double ker_tol, std::uint64_t seed) {
    if (!f.invariant())
        throw std::runtime_error(
            "invariance_check: the deformation must be invariant so the deformed "
            "operators stay periodic");
    const GroupModel& G = D.cover->group();

    std::vector<double> ts{0.0};
    ts.insert(ts.end(), t_list.begin(), t_list.end());

    // one shared phase set so the per-t values are directly comparable
    std::vector<std::vector<double>> phases;
    if (G.is_lattice()) {
        SplitMix64 rng(seed);
        phases.resize(static_cast<std::size_t>(std::max(16, samples)));
        for (auto& th : phases) {
            th.resize(static_cast<std::size_t>(G.rank()));
            for (auto& v : th) v = rng.next_unit() * 2.0 * std::numbers::pi;
        }
    }

    InvarianceReport R;
    for (double t : ts) {
        DifferentialComplex Dt = (t == 0.0) ? D : witten_deform(D, f, t);
        std::vector<double> vals;
        if (G.is_lattice()) {
            const int n = D.cover->dim();
            std::vector<int> best(static_cast<std::size_t>(n) + 1, 0);
            bool first = true;
            for (const auto& th : phases) {
                auto dims = floquet_kernel_dims(Dt, th, ker_tol);
                for (int k = 0; k <= n; ++k)
                    best[static_cast<std::size_t>(k)] =
                        first ? dims[static_cast<std::size_t>(k)]
                              : std::min(best[static_cast<std::size_t>(k)],
                                         dims[static_cast<std::size_t>(k)]);
                first = false;
            }
            for (int v : best) vals.push_back(static_cast<double>(v));
        } else {
            vals = finite_cover_betti(Dt, ker_tol).values();
        }
        R.t_values.push_back(t);
        R.values.push_back(std::move(vals));
    }
    R.pass = true;
    for (std::size_t i = 1; i < R.values.size(); ++i)
        for (std::size_t k = 0; k < R.values[i].size(); ++k)
            if (std::abs(R.values[i][k] - R.values[0][k]) > 1e-12) R.pass = false;
    return R;
}

// ---------------------------------------------------------------------------
// Inequality ledger

MorseLedger morse_inequality_eval(const DifferentialComplex& D,
                                  const DiscreteMorseData& morse,
                                  const std::vector<double>& betti, double s,
                                  double t, int folner_kmin, int folner_kmax,
                                  double tol, const CalculusOptions& opts) {
    const int n = D.cover->dim();
    if (static_cast<int>(betti.size()) != n + 1)
        throw std::runtime_error("morse_inequality_eval: one oracle value per degree");
    if (folner_kmin > folner_kmax || folner_kmin < 0)
        throw std::runtime_error("morse_inequality_eval: bad box range");
    const GroupModel& G = D.cover->group();
    const double chi = static_cast<double>(D.cover->base().euler());
    const double top_rhs = (n % 2 ? -chi : chi) + 0.0; // flush -0 for stable output

    std::vector<TileFunction> counts;
    for (int k = 0; k <= n; ++k) counts.push_back(morse.critical_count(k));

    DifferentialComplex Dt = (t == 0.0) ? D : witten_deform(D, morse.f(), t);
    std::vector<TileFunction> heat;
    for (int k = 0; k <= n; ++k) {
        if (s == 0.0) {
            heat.push_back(TileFunction::constant(
                static_cast<double>(D.cover->tile_cells(k))));
            continue;
        }
        CalculusOptions ok = opts;
        if (static_cast<std::size_t>(k) < Dt.lam_bound.size() &&
            Dt.lam_bound[static_cast<std::size_t>(k)] > 0.0)
            ok.lam_max_override = Dt.lam_bound[static_cast<std::size_t>(k)];
        heat.push_back(poly_calculus(Dt.laplacian(k), HeatFunction{s}, ok)
                           .op.piecewise_trace());
    }

    MorseLedger L;
    L.all_pass = true;
    auto emit = [&](const std::string& stanza, int k, const TileFunction& lhs_fn,
                    double rhs, bool top) {
        double lhs = folner_average(G, lhs_fn, folner_kmax);
        bool verdict;
        if (top) {
            verdict = std::abs(lhs - rhs) <= tol;
        } else {
            verdict = geq_mod_ideal(G, lhs_fn, TileFunction::constant(rhs),
                                    folner_kmin, folner_kmax, tol)
                          .pass;
        }
        L.rows.push_back({stanza, k, lhs, rhs, verdict, folner_kmax, lhs - rhs});
        if (!verdict) L.all_pass = false;
    };

    TileFunction phi = counts[0];
    for (int k = 0; k <= n; ++k) {
        if (k > 0) phi = counts[static_cast<std::size_t>(k)] - phi;
        double rhs = 0.0;
        for (int i = 0; i <= k; ++i)
            rhs += (((k - i) % 2) ? -betti[static_cast<std::size_t>(i)]
                                  : betti[static_cast<std::size_t>(i)]);
        emit("count", k, phi, (k == n) ? top_rhs : rhs, k == n);
    }

    TileFunction psi = heat[0];
    for (int k = 0; k <= n; ++k) {
        if (k > 0) psi = heat[static_cast<std::size_t>(k)] - psi;
        emit("heat", k, psi, (k == n) ? top_rhs : 0.0, k == n);
    }
    return L;
}

} // namespace l2morse
