#include "l2morse/calculus.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "l2morse/util.hpp"

namespace l2morse {

double eval_spectral(const SpectralFunction& f, double x) {
    if (std::holds_alternative<HeatFunction>(f))
        return std::exp(-std::get<HeatFunction>(f).s * x);
    const auto& c = std::get<CutoffFunction>(f);
    if (x <= c.a) return 1.0;
    if (x >= c.b) return 0.0;
    // mollifier step: all derivatives vanish at both ends of the transition
    double u = (x - c.a) / (c.b - c.a);
    double pa = std::exp(-1.0 / (1.0 - u)); // phi(1-u)
    double pb = std::exp(-1.0 / u);         // phi(u)
    return pa / (pa + pb);
}

std::vector<double> chebyshev_coeffs(const SpectralFunction& f, double lam_max,
                                     double eps, int max_degree) {
    if (!(lam_max > 0.0)) throw std::invalid_argument("chebyshev_coeffs: lam_max must be positive");
    if (!(eps > 0.0)) throw std::invalid_argument("chebyshev_coeffs: eps must be positive");
    if (max_degree < 0) throw std::invalid_argument("chebyshev_coeffs: negative degree cap");

    const long jslack = 64;
    const long jcap_want = static_cast<long>(max_degree) + jslack;
    const long N_cap = 1L << 21;

    std::vector<double> prev;
    long prev_jcap = -1;
    for (long N = 1024;; N *= 2) {
        if (N > N_cap)
            throw std::runtime_error(
                "chebyshev_coeffs: quadrature did not stabilize below the node cap; "
                "eps=" + fmt17(eps) + " lam_max=" + fmt17(lam_max));
        const long jcap = std::min(N - 1, jcap_want);
        std::vector<double> cur(static_cast<std::size_t>(jcap) + 1, 0.0);
        for (long i = 0; i < N; ++i) {
            double theta = std::numbers::pi * (static_cast<double>(i) + 0.5) /
                           static_cast<double>(N);
            double ct = std::cos(theta);
            double gi = eval_spectral(f, lam_max * (ct + 1.0) * 0.5);
            if (gi == 0.0) continue;
            double t0 = 1.0, t1 = ct;
            cur[0] += gi;
            if (jcap >= 1) cur[1] += gi * ct;
            for (long j = 2; j <= jcap; ++j) {
                double t2 = 2.0 * ct * t1 - t0;
                cur[static_cast<std::size_t>(j)] += gi * t2;
                t0 = t1;
                t1 = t2;
            }
        }
        for (auto& v : cur) v *= 2.0 / static_cast<double>(N);
        cur[0] *= 0.5;

        // the expansion must have died down within the measured range
        double last8 = 0.0;
        for (long j = std::max(0L, jcap - 8); j <= jcap; ++j)
            last8 = std::max(last8, std::abs(cur[static_cast<std::size_t>(j)]));
        if (last8 > 0.7 * eps * 1e-3) {
            prev = cur;
            prev_jcap = jcap;
            if (jcap < jcap_want) continue; // more coefficients available: grow N
            std::ostringstream msg;
            msg << "chebyshev_coeffs: expansion needs degree beyond the cap "
                << max_degree << " (coefficients still at " << fmt17(last8)
                << " near the cap) for eps=" << fmt17(eps)
                << ", lam_max=" << fmt17(lam_max);
            throw std::runtime_error(msg.str());
        }

        // shortest truncation whose discarded tail fits the budget
        std::vector<double> suffix(static_cast<std::size_t>(jcap) + 2, 0.0);
        for (long j = jcap; j >= 0; --j)
            suffix[static_cast<std::size_t>(j)] =
                suffix[static_cast<std::size_t>(j) + 1] +
                std::abs(cur[static_cast<std::size_t>(j)]);
        long m = jcap; // suffix[jcap+1] == 0, so the scan always lands
        for (long cand = 0; cand <= jcap; ++cand) {
            if (suffix[static_cast<std::size_t>(cand) + 1] <= 0.7 * eps) {
                m = cand;
                break;
            }
        }
        if (m > max_degree) {
            if (jcap < jcap_want) { // more coefficients available: grow N
                prev = cur;
                prev_jcap = jcap;
                continue;
            }
            std::ostringstream msg;
            msg << "chebyshev_coeffs: required degree " << m << " exceeds the cap "
                << max_degree << " for eps=" << fmt17(eps)
                << ", lam_max=" << fmt17(lam_max);
            throw std::runtime_error(msg.str());
        }

        // doubling the node count must reproduce the retained coefficients
        // (plus slack). Comparing only that range matters twice over: it is
        // what the approximant is built from, and the three-term recurrence
        // noise on far-tail indices (~ jcap * ulp) never settles below a
        // tight eps, so a full-range comparison would thrash N for nothing.
        bool stable = false;
        if (prev_jcap >= 0) {
            const long jchk = std::min(prev_jcap, m + jslack);
            double diff = 0.0;
            for (long j = 0; j <= jchk; ++j)
                diff = std::max(diff,
                                std::abs(cur[static_cast<std::size_t>(j)] -
                                         prev[static_cast<std::size_t>(j)]));
            stable = diff <= eps / 40.0;
        }
        prev = cur;
        prev_jcap = jcap;
        if (!stable) continue;

        if (m > jcap - jslack) continue; // too close to the measured edge
        cur.resize(static_cast<std::size_t>(m) + 1);
        return cur;
    }
}

// ---------------------------------------------------------------------------
// operator recurrence

namespace {

// Flat indexing of the vector support: the deck-offset box of radius RB for
// invariant operators (lattice row-major / cyclic residues).
struct OffsetSpace {
    bool cyclic = false;
    long long N = 0;  // cyclic order
    int d = 1;
    long long RB = 0; // lattice box radius
    long long count = 0;
    long long center = 0;
    std::vector<long long> strides;
};

OffsetSpace build_offset_space(const GroupModel& G, long long RB) {
    OffsetSpace S;
    if (!G.is_lattice()) {
        S.cyclic = true;
        S.N = G.order();
        S.count = S.N;
        S.center = 0;
        return S;
    }
    S.d = G.rank();
    S.RB = RB;
    long long side = 2 * RB + 1;
    S.strides.assign(static_cast<std::size_t>(S.d), 1);
    long long count = 1;
    for (int i = S.d - 1; i >= 0; --i) {
        S.strides[static_cast<std::size_t>(i)] = count;
        count *= side;
        if (count > (1LL << 31))
            throw std::runtime_error(
                "poly_calculus: offset box overflows the index space; "
                "the polynomial propagates too far");
    }
    S.count = count;
    for (int i = 0; i < S.d; ++i)
        S.center += RB * S.strides[static_cast<std::size_t>(i)];
    return S;
}

// visit (target, source) flat index pairs for one propagation offset
template <class F>
void for_each_valid(const OffsetSpace& S, const std::vector<std::int64_t>& off, F&& fn) {
    if (S.cyclic) {
        long long o = ((off[0] % S.N) + S.N) % S.N;
        for (long long ti = 0; ti < S.N; ++ti) {
            long long si = ti - o;
            if (si < 0) si += S.N;
            fn(ti, si);
        }
        return;
    }
    int d = S.d;
    std::vector<long long> lo(static_cast<std::size_t>(d)), hi(static_cast<std::size_t>(d)),
        cur(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
        lo[static_cast<std::size_t>(i)] = std::max(-S.RB, -S.RB + off[static_cast<std::size_t>(i)]);
        hi[static_cast<std::size_t>(i)] = std::min(S.RB, S.RB + off[static_cast<std::size_t>(i)]);
        if (lo[static_cast<std::size_t>(i)] > hi[static_cast<std::size_t>(i)]) return;
    }
    long long delta = 0, ti = 0;
    for (int i = 0; i < d; ++i) {
        delta += off[static_cast<std::size_t>(i)] * S.strides[static_cast<std::size_t>(i)];
        ti += (lo[static_cast<std::size_t>(i)] + S.RB) * S.strides[static_cast<std::size_t>(i)];
        cur[static_cast<std::size_t>(i)] = lo[static_cast<std::size_t>(i)];
    }
    for (;;) {
        fn(ti, ti - delta);
        int i = d - 1;
        for (; i >= 0; --i) {
            auto ui = static_cast<std::size_t>(i);
            if (cur[ui] < hi[ui]) {
                ++cur[ui];
                ti += S.strides[ui];
                break;
            }
            ti -= (hi[ui] - lo[ui]) * S.strides[ui];
            cur[ui] = lo[ui];
        }
        if (i < 0) break;
    }
}

// Chebyshev recurrence in u = 2x/lam - 1 for one start vector; applyA must be
// a fixed-order linear map (the orthonormalized operator).
template <class ApplyA>
Eigen::VectorXd cheb_column(const std::vector<double>& c, double lam,
                            ApplyA&& applyA, Eigen::VectorXd v0) {
    Eigen::VectorXd acc = c[0] * v0;
    if (c.size() == 1) return acc;
    Eigen::VectorXd av(v0.size()), v1(v0.size()), v2(v0.size());
    applyA(v0, av);
    v1 = (2.0 / lam) * av - v0;
    acc += c[1] * v1;
    for (std::size_t j = 2; j < c.size(); ++j) {
        applyA(v1, av);
        v2 = (4.0 / lam) * av - 2.0 * v1 - v0;
        acc += c[j] * v2;
        v0.swap(v1);
        v1.swap(v2);
    }
    return acc;
}

bool exactly_zero(const Eigen::MatrixXd& M) {
    for (Eigen::Index c = 0; c < M.cols(); ++c)
        for (Eigen::Index r = 0; r < M.rows(); ++r)
            if (M(r, c) != 0.0) return false;
    return true;
}

} // namespace

PolyResult poly_calculus(const WindowedOperator& A, const SpectralFunction& f,
                         const CalculusOptions& opt) {
    if (!A.square()) throw std::runtime_error("poly_calculus: operator is not square");
    const CoverPtr& cover = A.cover();
    const GroupModel& G = cover->group();
    const int deg = A.src_deg();
    const int m = cover->tile_cells(deg);

    double scale = A.max_abs_entry();
    double sa = A.self_adjoint_defect();
    if (sa > 1e-10 * (1.0 + scale)) {
        std::ostringstream msg;
        msg << "poly_calculus: operator is not self-adjoint (defect " << fmt17(sa)
            << " at entry scale " << fmt17(scale) << ")";
        throw std::runtime_error(msg.str());
    }
    double lam = opt.lam_max_override > 0.0
                     ? opt.lam_max_override
                     : A.gershgorin_interval().second * (1.0 + 1e-6);
    if (lam <= 0.0) lam = 1e-12;

    double tail = 0.0;
    std::vector<double> c = chebyshev_coeffs(f, lam, opt.eps, opt.max_degree);
    // the tail reported is the truncation budget actually allowed
    tail = 0.7 * opt.eps;
    const int mdeg = static_cast<int>(c.size()) - 1;
    const int r = A.radius();

    PolyResult out;
    out.degree = mdeg;
    out.lam_max = lam;
    out.coeff_tail = tail;

    // weights for the orthonormal <-> raw change of basis
    const auto& wts = cover->base().weights(deg);
    Eigen::VectorXd sqw(m), isqw(m);
    for (int i = 0; i < m; ++i) {
        sqw[i] = std::sqrt(wts[static_cast<std::size_t>(i)]);
        isqw[i] = 1.0 / sqw[i];
    }
    auto on_block = [&](const Eigen::MatrixXd& raw) {
        return (sqw.asDiagonal() * raw * isqw.asDiagonal()).eval();
    };

    if (m == 0) {
        out.op = WindowedOperator::zero(cover, deg, deg);
        return out;
    }

    if (A.is_invariant()) {
        const long long RB = static_cast<long long>(mdeg) * r;
        OffsetSpace S = build_offset_space(G, RB);

        std::vector<std::pair<std::vector<std::int64_t>, Eigen::MatrixXd>> ops;
        for (const auto& [o, M] : A.offset_blocks())
            ops.emplace_back(o.c, on_block(M));

        // result blocks, preallocated so the column workers write disjoint slots
        std::map<GroupElement, Eigen::MatrixXd> offs;
        std::vector<Eigen::MatrixXd*> slot(static_cast<std::size_t>(S.count));
        if (S.cyclic) {
            for (long long ti = 0; ti < S.count; ++ti) {
                GroupElement g = G.make({ti});
                auto [it, fresh] = offs.try_emplace(g, Eigen::MatrixXd::Zero(m, m));
                slot[static_cast<std::size_t>(ti)] = &it->second;
            }
        } else {
            std::vector<GroupElement> box = G.box_elements(static_cast<int>(RB));
            for (const GroupElement& g : box) {
                long long ti = 0;
                for (int i = 0; i < S.d; ++i)
                    ti += (g.c[static_cast<std::size_t>(i)] + RB) *
                          S.strides[static_cast<std::size_t>(i)];
                auto [it, fresh] = offs.try_emplace(g, Eigen::MatrixXd::Zero(m, m));
                slot[static_cast<std::size_t>(ti)] = &it->second;
            }
        }

        auto applyA = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
            y.setZero();
            for (const auto& [off, M] : ops)
                for_each_valid(S, off, [&](long long ti, long long si) {
                    y.segment(ti * m, m).noalias() += M * x.segment(si * m, m);
                });
        };

        parallel_for(m, [&](int col) {
            Eigen::VectorXd v0 = Eigen::VectorXd::Zero(S.count * m);
            v0[S.center * m + col] = 1.0;
            Eigen::VectorXd acc = cheb_column(c, lam, applyA, std::move(v0));
            for (long long ti = 0; ti < S.count; ++ti) {
                auto seg = acc.segment(ti * m, m);
                Eigen::MatrixXd& blk = *slot[static_cast<std::size_t>(ti)];
                for (int row = 0; row < m; ++row)
                    blk(row, col) = seg[row] * sqw[col] * isqw[row];
            }
        });

        for (auto it = offs.begin(); it != offs.end();) {
            if (exactly_zero(it->second))
                it = offs.erase(it);
            else
                ++it;
        }
        out.op = WindowedOperator::from_offsets(cover, deg, deg, std::move(offs));
        return out;
    }

    // ----- general (window) path -----
    const TileWindow& W = cover->window();
    const long long need = static_cast<long long>(mdeg) * r;
    const long long mu_eff =
        std::min(static_cast<long long>(A.margin()) - need,
                 static_cast<long long>(W.radius()) - need);
    if (mu_eff < 0) {
        std::ostringstream msg;
        msg << "poly_calculus: window too small: degree " << mdeg << " x radius " << r
            << " consumes " << need << " tiles of exactness margin, but the operator"
            << " has margin " << A.margin() << " on a radius-" << W.radius()
            << " window; enlarge the window radius by at least " << (-mu_eff);
        throw std::runtime_error(msg.str());
    }

    std::vector<std::tuple<int, int, Eigen::MatrixXd>> trips;
    for (const auto& [key, M] : A.indexed_blocks())
        trips.emplace_back(key.first, key.second, on_block(M));

    // certified source tiles, window (lex) order
    std::vector<int> cols_tiles;
    for (int t = 0; t < W.count(); ++t)
        if (G.box_norm(W.at(t)) <= mu_eff) cols_tiles.push_back(t);

    // preallocate result blocks for the column slabs
    std::map<std::pair<int, int>, Eigen::MatrixXd> blocks;
    std::vector<std::vector<std::pair<int, Eigen::MatrixXd*>>> slabs(cols_tiles.size());
    for (std::size_t ci = 0; ci < cols_tiles.size(); ++ci) {
        int hi = cols_tiles[ci];
        GroupElement h = W.at(hi);
        for (int gi = 0; gi < W.count(); ++gi) {
            if (G.word_distance(W.at(gi), h) > need) continue;
            auto [it, fresh] =
                blocks.try_emplace({gi, hi}, Eigen::MatrixXd::Zero(m, m));
            slabs[ci].emplace_back(gi, &it->second);
        }
    }

    auto applyA = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
        y.setZero();
        for (const auto& [gi, hi, M] : trips)
            y.segment(static_cast<long long>(gi) * m, m).noalias() +=
                M * x.segment(static_cast<long long>(hi) * m, m);
    };

    parallel_for(static_cast<int>(cols_tiles.size()) * m, [&](int job) {
        int ci = job / m, col = job % m;
        Eigen::VectorXd v0 = Eigen::VectorXd::Zero(static_cast<long long>(W.count()) * m);
        v0[static_cast<long long>(cols_tiles[static_cast<std::size_t>(ci)]) * m + col] = 1.0;
        Eigen::VectorXd acc = cheb_column(c, lam, applyA, std::move(v0));
        for (auto& [gi, blk] : slabs[static_cast<std::size_t>(ci)]) {
            auto seg = acc.segment(static_cast<long long>(gi) * m, m);
            for (int row = 0; row < m; ++row)
                (*blk)(row, col) = seg[row] * sqw[col] * isqw[row];
        }
    });

    // mirror the certified columns onto the rows of the same tiles
    // (f(A) is self-adjoint: raw[t,x] is the weighted transpose of raw[x,t])
    Eigen::VectorXd wv(m), wiv(m);
    for (int i = 0; i < m; ++i) {
        wv[i] = wts[static_cast<std::size_t>(i)];
        wiv[i] = 1.0 / wv[i];
    }
    for (std::size_t ci = 0; ci < cols_tiles.size(); ++ci) {
        int hi = cols_tiles[ci];
        for (auto& [gi, blk] : slabs[ci]) {
            if (G.box_norm(W.at(gi)) <= mu_eff) continue; // both certified already
            blocks[{hi, gi}] = wiv.asDiagonal() * blk->transpose() * wv.asDiagonal();
        }
    }
    for (auto it = blocks.begin(); it != blocks.end();) {
        if (exactly_zero(it->second))
            it = blocks.erase(it);
        else
            ++it;
    }
    out.op = WindowedOperator::from_blocks(cover, deg, deg, std::move(blocks),
                                           static_cast<int>(need),
                                           static_cast<int>(mu_eff));
    return out;
}

Eigen::MatrixXd dense_function_on(const Eigen::MatrixXd& sym, const SpectralFunction& f) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("dense_function_on: eigensolver failed");
    Eigen::VectorXd fe = es.eigenvalues();
    for (Eigen::Index i = 0; i < fe.size(); ++i) fe[i] = eval_spectral(f, fe[i]);
    return es.eigenvectors() * fe.asDiagonal() * es.eigenvectors().transpose();
}

} // namespace l2morse
