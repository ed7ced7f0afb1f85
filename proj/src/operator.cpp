#include "l2morse/operator.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "l2morse/rng.hpp"
#include "l2morse/util.hpp"

namespace l2morse {

namespace {

Eigen::VectorXd weight_vec(const BaseComplex& base, int k) {
    const auto& w = base.weights(k);
    Eigen::VectorXd v(static_cast<Eigen::Index>(w.size()));
    for (std::size_t i = 0; i < w.size(); ++i) v[static_cast<Eigen::Index>(i)] = w[i];
    return v;
}

// Entry scale factors between the raw cell basis and the orthonormal basis:
// on(r,c) = sqrt(w_tgt[r] / w_src[c]) * raw(r,c).
struct OnScaling {
    Eigen::VectorXd sqrt_wt;     // sqrt of target weights
    Eigen::VectorXd inv_sqrt_ws; // 1/sqrt of source weights
    Eigen::VectorXd wt;          // target weights
    Eigen::VectorXd inv_ws;      // 1/source weights

    OnScaling(const BaseComplex& base, int src_deg, int tgt_deg) {
        wt = weight_vec(base, tgt_deg);
        Eigen::VectorXd ws = weight_vec(base, src_deg);
        sqrt_wt = wt.array().sqrt();
        inv_sqrt_ws = ws.array().rsqrt();
        inv_ws = ws.array().inverse();
    }

    Eigen::MatrixXd on(const Eigen::MatrixXd& raw) const {
        return sqrt_wt.asDiagonal() * raw * inv_sqrt_ws.asDiagonal();
    }
};

// sum_{r,c} w_tgt[r] * A(r,c) * B(r,c) / w_src[c], fixed column-major order
double weighted_pair_sum(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                         const OnScaling& sc) {
    double s = 0.0;
    for (Eigen::Index c = 0; c < A.cols(); ++c) {
        double col = 0.0;
        for (Eigen::Index r = 0; r < A.rows(); ++r)
            col += sc.wt[r] * A(r, c) * B(r, c);
        s += col * sc.inv_ws[c];
    }
    return s;
}

double weighted_sq_sum(const Eigen::MatrixXd& A, const OnScaling& sc) {
    return weighted_pair_sum(A, A, sc);
}

long long sat_margin(long long m) {
    if (m >= WindowedOperator::kFullMargin) return WindowedOperator::kFullMargin;
    if (m < -1) return -1;
    return m;
}

} // namespace

// ---------------------------------------------------------------------------
// constructors

WindowedOperator WindowedOperator::zero(CoverPtr cover, int src_deg, int tgt_deg) {
    WindowedOperator A;
    A.cover_ = std::move(cover);
    A.src_deg_ = src_deg;
    A.tgt_deg_ = tgt_deg;
    A.radius_ = 0;
    A.margin_ = kFullMargin;
    A.invariant_ = true;
    return A;
}

WindowedOperator WindowedOperator::identity(CoverPtr cover, int deg) {
    WindowedOperator A = zero(std::move(cover), deg, deg);
    int m = A.cover_->tile_cells(deg);
    A.offsets_[A.cover_->group().identity()] = Eigen::MatrixXd::Identity(m, m);
    return A;
}

WindowedOperator WindowedOperator::deck_shift(CoverPtr cover, int deg,
                                              const GroupElement& offset) {
    WindowedOperator A = zero(std::move(cover), deg, deg);
    const GroupModel& G = A.cover_->group();
    GroupElement key = G.make(offset.c); // validates shape / reduces
    int m = A.cover_->tile_cells(deg);
    A.offsets_[key] = Eigen::MatrixXd::Identity(m, m);
    A.radius_ = static_cast<int>(G.word_norm(key));
    return A;
}

WindowedOperator WindowedOperator::diagonal(
    CoverPtr cover, int deg,
    const std::function<double(const GroupElement&, int)>& values, bool invariant) {
    if (invariant) {
        WindowedOperator A = zero(std::move(cover), deg, deg);
        int m = A.cover_->tile_cells(deg);
        Eigen::MatrixXd D = Eigen::MatrixXd::Zero(m, m);
        GroupElement e = A.cover_->group().identity();
        for (int i = 0; i < m; ++i) D(i, i) = values(e, i);
        A.offsets_[e] = std::move(D);
        return A;
    }
    WindowedOperator A;
    A.cover_ = std::move(cover);
    A.src_deg_ = A.tgt_deg_ = deg;
    A.radius_ = 0;
    A.margin_ = A.cover_->window().radius();
    A.invariant_ = false;
    const TileWindow& W = A.cover_->window();
    int m = A.cover_->tile_cells(deg);
    for (int t = 0; t < W.count(); ++t) {
        GroupElement g = W.at(t);
        Eigen::MatrixXd D = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) D(i, i) = values(g, i);
        A.blocks_[{t, t}] = std::move(D);
    }
    return A;
}

WindowedOperator WindowedOperator::from_offsets(CoverPtr cover, int src_deg, int tgt_deg,
                                                std::map<GroupElement, Eigen::MatrixXd> offsets) {
    WindowedOperator A = zero(std::move(cover), src_deg, tgt_deg);
    const GroupModel& G = A.cover_->group();
    long long rad = 0;
    for (const auto& [o, M] : offsets) {
        G.make(o.c); // shape check
        if (M.rows() != A.rows_per_tile() || M.cols() != A.cols_per_tile())
            throw std::runtime_error("from_offsets: block shape mismatch");
        rad = std::max(rad, static_cast<long long>(G.word_norm(o)));
    }
    A.offsets_ = std::move(offsets);
    A.radius_ = static_cast<int>(rad);
    return A;
}

WindowedOperator WindowedOperator::from_blocks(
    CoverPtr cover, int src_deg, int tgt_deg,
    std::map<std::pair<int, int>, Eigen::MatrixXd> blocks, int radius, int margin) {
    WindowedOperator A;
    A.cover_ = std::move(cover);
    A.src_deg_ = src_deg;
    A.tgt_deg_ = tgt_deg;
    A.radius_ = radius;
    A.margin_ = static_cast<int>(sat_margin(margin));
    A.invariant_ = false;
    int T = A.cover_->window().count();
    for (const auto& [key, M] : blocks) {
        if (key.first < 0 || key.first >= T || key.second < 0 || key.second >= T)
            throw std::runtime_error("from_blocks: tile index out of window");
        if (M.rows() != A.rows_per_tile() || M.cols() != A.cols_per_tile())
            throw std::runtime_error("from_blocks: block shape mismatch");
    }
    A.blocks_ = std::move(blocks);
    return A;
}

// ---------------------------------------------------------------------------
// access

const Eigen::MatrixXd* WindowedOperator::block(const GroupElement& g,
                                               const GroupElement& h) const {
    if (invariant_) {
        auto it = offsets_.find(cover_->group().diff(g, h));
        return it == offsets_.end() ? nullptr : &it->second;
    }
    const TileWindow& W = cover_->window();
    int gi = W.index(g), hi = W.index(h);
    if (gi < 0 || hi < 0) return nullptr;
    auto it = blocks_.find({gi, hi});
    return it == blocks_.end() ? nullptr : &it->second;
}

const std::map<GroupElement, Eigen::MatrixXd>& WindowedOperator::offset_blocks() const {
    if (!invariant_)
        throw std::runtime_error("offset_blocks: operator is not in invariant mode");
    return offsets_;
}

void WindowedOperator::require_same_space(const WindowedOperator& o) const {
    if (cover_.get() == o.cover_.get()) return;
    if (cover_ && o.cover_ && cover_->window() == o.cover_->window() &&
        cover_->base().name() == o.cover_->base().name())
        return;
    throw std::runtime_error("operators live on different covers");
}

// ---------------------------------------------------------------------------
// algebra

WindowedOperator compose(const WindowedOperator& A, const WindowedOperator& B) {
    A.require_same_space(B);
    if (A.src_deg_ != B.tgt_deg_)
        throw std::runtime_error("compose: inner degrees do not match");

    const GroupModel& G = A.cover_->group();

    if (A.invariant_ && B.invariant_) {
        WindowedOperator C = WindowedOperator::zero(A.cover_, B.src_deg_, A.tgt_deg_);
        for (const auto& [o1, M1] : A.offsets_) {
            for (const auto& [o2, M2] : B.offsets_) {
                GroupElement o = G.mul(o1, o2);
                auto [it, fresh] = C.offsets_.try_emplace(
                    o, Eigen::MatrixXd::Zero(M1.rows(), M2.cols()));
                it->second.noalias() += M1 * M2;
            }
        }
        C.radius_ = A.radius_ + B.radius_;
        return C;
    }

    // Materialize an invariant factor so both sides are tile-indexed.
    const TileWindow& W = A.cover_->window();
    auto materialize = [&](const WindowedOperator& X) {
        std::map<std::pair<int, int>, Eigen::MatrixXd> out;
        for (int gi = 0; gi < W.count(); ++gi) {
            GroupElement g = W.at(gi);
            for (const auto& [o, M] : X.offsets_) {
                int hi = W.index(G.mul(g, G.inverse(o))); // h with g - h = o
                if (hi >= 0) out[{gi, hi}] = M;
            }
        }
        return out;
    };
    std::map<std::pair<int, int>, Eigen::MatrixXd> tmpA, tmpB;
    const auto& Ab = A.invariant_ ? (tmpA = materialize(A)) : A.blocks_;
    const auto& Bb = B.invariant_ ? (tmpB = materialize(B)) : B.blocks_;

    WindowedOperator C;
    C.cover_ = A.cover_;
    C.src_deg_ = B.src_deg_;
    C.tgt_deg_ = A.tgt_deg_;
    C.radius_ = A.radius_ + B.radius_;
    C.margin_ = static_cast<int>(sat_margin(
        std::min(static_cast<long long>(A.margin_) - B.radius_,
                 static_cast<long long>(B.margin_) - A.radius_)));
    C.invariant_ = false;

    // For each stored A[g,u], stream the B blocks with target u. The middle
    // tile u is consumed in ascending (lex) order for every product block, so
    // the floating-point accumulation order is canonical.
    for (const auto& [akey, MA] : Ab) {
        auto lo = Bb.lower_bound({akey.second, 0});
        auto hi = Bb.lower_bound({akey.second + 1, 0});
        for (auto it = lo; it != hi; ++it) {
            auto [fit, fresh] = C.blocks_.try_emplace(
                std::pair<int, int>{akey.first, it->first.second},
                Eigen::MatrixXd::Zero(MA.rows(), it->second.cols()));
            fit->second.noalias() += MA * it->second;
        }
    }
    return C;
}

WindowedOperator adjoint(const WindowedOperator& A) {
    const BaseComplex& base = A.cover_->base();
    Eigen::VectorXd ws = weight_vec(base, A.src_deg_);
    Eigen::VectorXd wt = weight_vec(base, A.tgt_deg_);
    Eigen::VectorXd ws_inv = ws.array().inverse();

    auto star = [&](const Eigen::MatrixXd& M) -> Eigen::MatrixXd {
        return ws_inv.asDiagonal() * M.transpose() * wt.asDiagonal();
    };

    WindowedOperator S;
    S.cover_ = A.cover_;
    S.src_deg_ = A.tgt_deg_;
    S.tgt_deg_ = A.src_deg_;
    S.radius_ = A.radius_;
    S.margin_ = A.margin_;
    S.invariant_ = A.invariant_;
    if (A.invariant_) {
        const GroupModel& G = A.cover_->group();
        for (const auto& [o, M] : A.offsets_) S.offsets_[G.inverse(o)] = star(M);
    } else {
        for (const auto& [key, M] : A.blocks_)
            S.blocks_[{key.second, key.first}] = star(M);
    }
    return S;
}

WindowedOperator add(const WindowedOperator& A, const WindowedOperator& B) {
    A.require_same_space(B);
    if (A.src_deg_ != B.src_deg_ || A.tgt_deg_ != B.tgt_deg_)
        throw std::runtime_error("add: degree mismatch");
    if (A.invariant_ && B.invariant_) {
        WindowedOperator C = A;
        for (const auto& [o, M] : B.offsets_) {
            auto [it, fresh] = C.offsets_.try_emplace(o, M);
            if (!fresh) it->second += M;
        }
        C.radius_ = std::max(A.radius_, B.radius_);
        return C;
    }
    if (A.invariant_ != B.invariant_)
        throw std::runtime_error("add: cannot mix invariant and general storage");
    WindowedOperator C = A;
    for (const auto& [key, M] : B.blocks_) {
        auto [it, fresh] = C.blocks_.try_emplace(key, M);
        if (!fresh) it->second += M;
    }
    C.radius_ = std::max(A.radius_, B.radius_);
    C.margin_ = std::min(A.margin_, B.margin_);
    return C;
}

WindowedOperator subtract(const WindowedOperator& A, const WindowedOperator& B) {
    return add(A, B.scaled(-1.0));
}

WindowedOperator WindowedOperator::scaled(double c) const {
    WindowedOperator C = *this;
    for (auto& [o, M] : C.offsets_) M *= c;
    for (auto& [k, M] : C.blocks_) M *= c;
    return C;
}

// ---------------------------------------------------------------------------
// piecewise quantities

TileFunction WindowedOperator::rho2() const {
    OnScaling sc(cover_->base(), src_deg_, tgt_deg_);
    if (invariant_) {
        double s = 0.0;
        for (const auto& [o, M] : offsets_) s += weighted_sq_sum(M, sc);
        return TileFunction::constant(std::sqrt(s));
    }
    const TileWindow& W = cover_->window();
    std::vector<double> acc(static_cast<std::size_t>(W.count()), 0.0);
    for (const auto& [key, M] : blocks_)
        acc[static_cast<std::size_t>(key.second)] += weighted_sq_sum(M, sc);
    const GroupModel& G = cover_->group();
    std::map<GroupElement, double> vals;
    for (int t = 0; t < W.count(); ++t) {
        GroupElement g = W.at(t);
        if (G.box_norm(g) <= margin_) vals[g] = std::sqrt(acc[static_cast<std::size_t>(t)]);
    }
    return TileFunction::windowed(std::move(vals));
}

TileFunction rho2_pairing(const WindowedOperator& A, const WindowedOperator& B) {
    A.require_same_space(B);
    if (A.src_deg_ != B.src_deg_ || A.tgt_deg_ != B.tgt_deg_)
        throw std::runtime_error("rho2_pairing: degree mismatch");
    OnScaling sc(A.cover_->base(), A.src_deg_, A.tgt_deg_);
    if (A.invariant_ && B.invariant_) {
        double s = 0.0;
        for (const auto& [o, M] : A.offsets_) {
            auto it = B.offsets_.find(o);
            if (it != B.offsets_.end()) s += weighted_pair_sum(M, it->second, sc);
        }
        return TileFunction::constant(s);
    }
    const TileWindow& W = A.cover_->window();
    const GroupModel& G = A.cover_->group();
    int margin = std::min(A.margin_, B.margin_);
    std::map<GroupElement, double> vals;
    for (int hi = 0; hi < W.count(); ++hi) {
        GroupElement h = W.at(hi);
        if (G.box_norm(h) > margin) continue;
        double s = 0.0;
        for (int gi = 0; gi < W.count(); ++gi) {
            GroupElement g = W.at(gi);
            const Eigen::MatrixXd* a = A.block(g, h);
            if (!a) continue;
            const Eigen::MatrixXd* b = B.block(g, h);
            if (!b) continue;
            s += weighted_pair_sum(*a, *b, sc);
        }
        vals[h] = s;
    }
    return TileFunction::windowed(std::move(vals));
}

TileFunction WindowedOperator::piecewise_trace() const {
    if (!square()) throw std::runtime_error("piecewise_trace: operator is not square");
    if (invariant_) {
        auto it = offsets_.find(cover_->group().identity());
        return TileFunction::constant(it == offsets_.end() ? 0.0 : it->second.trace());
    }
    const TileWindow& W = cover_->window();
    const GroupModel& G = cover_->group();
    std::map<GroupElement, double> vals;
    for (int t = 0; t < W.count(); ++t) {
        GroupElement g = W.at(t);
        if (G.box_norm(g) > margin_) continue;
        auto it = blocks_.find({t, t});
        vals[g] = (it == blocks_.end()) ? 0.0 : it->second.trace();
    }
    return TileFunction::windowed(std::move(vals));
}

TileFunction WindowedOperator::rho1() const {
    if (!square()) throw std::runtime_error("rho1: operator is not square");
    auto absdiag = [](const Eigen::MatrixXd& M) {
        return M.diagonal().array().abs().sum();
    };
    if (invariant_) {
        auto it = offsets_.find(cover_->group().identity());
        return TileFunction::constant(it == offsets_.end() ? 0.0 : absdiag(it->second));
    }
    const TileWindow& W = cover_->window();
    const GroupModel& G = cover_->group();
    std::map<GroupElement, double> vals;
    for (int t = 0; t < W.count(); ++t) {
        GroupElement g = W.at(t);
        if (G.box_norm(g) > margin_) continue;
        auto it = blocks_.find({t, t});
        vals[g] = (it == blocks_.end()) ? 0.0 : absdiag(it->second);
    }
    return TileFunction::windowed(std::move(vals));
}

// ---------------------------------------------------------------------------
// norms and envelopes

double WindowedOperator::opnorm_bound() const {
    OnScaling sc(cover_->base(), src_deg_, tgt_deg_);
    int mr = rows_per_tile(), mc = cols_per_tile();
    auto on_abs = [&](const Eigen::MatrixXd& M) {
        return (sc.sqrt_wt.asDiagonal() * M * sc.inv_sqrt_ws.asDiagonal())
            .array()
            .abs()
            .matrix()
            .eval();
    };
    double max_row = 0.0, max_col = 0.0;
    if (invariant_) {
        Eigen::VectorXd rows = Eigen::VectorXd::Zero(mr);
        Eigen::VectorXd cols = Eigen::VectorXd::Zero(mc);
        for (const auto& [o, M] : offsets_) {
            Eigen::MatrixXd a = on_abs(M);
            rows += a.rowwise().sum();
            cols += a.colwise().sum().transpose();
        }
        max_row = (mr > 0) ? rows.maxCoeff() : 0.0;
        max_col = (mc > 0) ? cols.maxCoeff() : 0.0;
    } else {
        const TileWindow& W = cover_->window();
        const GroupModel& G = cover_->group();
        std::vector<Eigen::VectorXd> colsum(static_cast<std::size_t>(W.count()));
        std::vector<Eigen::VectorXd> rowsum(static_cast<std::size_t>(W.count()));
        for (const auto& [key, M] : blocks_) {
            Eigen::MatrixXd a = on_abs(M);
            auto& rs = rowsum[static_cast<std::size_t>(key.first)];
            if (rs.size() == 0) rs = Eigen::VectorXd::Zero(mr);
            rs += a.rowwise().sum();
            auto& cs = colsum[static_cast<std::size_t>(key.second)];
            if (cs.size() == 0) cs = Eigen::VectorXd::Zero(mc);
            cs += a.colwise().sum().transpose();
        }
        bool any = false;
        for (int t = 0; t < W.count(); ++t) {
            if (G.box_norm(W.at(t)) > margin_) continue;
            any = true;
            if (rowsum[static_cast<std::size_t>(t)].size() > 0)
                max_row = std::max(max_row, rowsum[static_cast<std::size_t>(t)].maxCoeff());
            if (colsum[static_cast<std::size_t>(t)].size() > 0)
                max_col = std::max(max_col, colsum[static_cast<std::size_t>(t)].maxCoeff());
        }
        if (!any)
            throw std::runtime_error(
                "opnorm_bound: exactness margin is empty; assemble a larger window");
    }
    return std::sqrt(max_row * max_col);
}

std::pair<double, double> WindowedOperator::gershgorin_interval() const {
    if (!square()) throw std::runtime_error("gershgorin_interval: operator is not square");
    OnScaling sc(cover_->base(), src_deg_, tgt_deg_);
    int m = rows_per_tile();
    if (m == 0) return {0.0, 0.0};
    auto on = [&](const Eigen::MatrixXd& M) {
        return (sc.sqrt_wt.asDiagonal() * M * sc.inv_sqrt_ws.asDiagonal()).eval();
    };
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    bool any = false;
    auto fold_row = [&](double diag, double abs_row_sum) {
        double off = abs_row_sum - std::abs(diag);
        lo = std::min(lo, diag - off);
        hi = std::max(hi, diag + off);
        any = true;
    };
    if (invariant_) {
        Eigen::VectorXd rows = Eigen::VectorXd::Zero(m);
        Eigen::VectorXd diag = Eigen::VectorXd::Zero(m);
        for (const auto& [o, M] : offsets_) {
            Eigen::MatrixXd a = on(M);
            rows += a.array().abs().matrix().rowwise().sum();
            if (o == cover_->group().identity()) diag = a.diagonal();
        }
        for (int r = 0; r < m; ++r) fold_row(diag[r], rows[r]);
    } else {
        const TileWindow& W = cover_->window();
        const GroupModel& G = cover_->group();
        std::vector<Eigen::VectorXd> rowsum(static_cast<std::size_t>(W.count()));
        std::vector<Eigen::VectorXd> diag(static_cast<std::size_t>(W.count()));
        for (const auto& [key, M] : blocks_) {
            Eigen::MatrixXd a = on(M);
            auto& rs = rowsum[static_cast<std::size_t>(key.first)];
            if (rs.size() == 0) rs = Eigen::VectorXd::Zero(m);
            rs += a.array().abs().matrix().rowwise().sum();
            if (key.first == key.second) diag[static_cast<std::size_t>(key.first)] = a.diagonal();
        }
        for (int t = 0; t < W.count(); ++t) {
            if (G.box_norm(W.at(t)) > margin_) continue;
            Eigen::VectorXd rs = rowsum[static_cast<std::size_t>(t)].size() > 0
                                     ? rowsum[static_cast<std::size_t>(t)]
                                     : Eigen::VectorXd::Zero(m);
            Eigen::VectorXd dg = diag[static_cast<std::size_t>(t)].size() > 0
                                     ? diag[static_cast<std::size_t>(t)]
                                     : Eigen::VectorXd::Zero(m);
            for (int r = 0; r < m; ++r) fold_row(dg[r], rs[r]);
        }
    }
    if (!any)
        throw std::runtime_error(
            "gershgorin_interval: exactness margin is empty; assemble a larger window");
    return {lo, hi};
}

double WindowedOperator::max_abs_entry() const {
    std::vector<double> env = distance_envelope();
    double m = 0.0;
    for (double v : env) m = std::max(m, v);
    return m;
}

std::vector<double> WindowedOperator::distance_envelope() const {
    OnScaling sc(cover_->base(), src_deg_, tgt_deg_);
    std::vector<double> env(static_cast<std::size_t>(radius_) + 1, 0.0);
    const GroupModel& G = cover_->group();
    auto fold = [&](std::int64_t d, const Eigen::MatrixXd& M) {
        double v = (sc.sqrt_wt.asDiagonal() * M * sc.inv_sqrt_ws.asDiagonal())
                       .array()
                       .abs()
                       .maxCoeff();
        if (d >= static_cast<std::int64_t>(env.size()))
            env.resize(static_cast<std::size_t>(d) + 1, 0.0);
        env[static_cast<std::size_t>(d)] = std::max(env[static_cast<std::size_t>(d)], v);
    };
    if (invariant_) {
        for (const auto& [o, M] : offsets_)
            if (M.size() > 0) fold(G.word_norm(o), M);
    } else {
        const TileWindow& W = cover_->window();
        for (const auto& [key, M] : blocks_) {
            if (M.size() == 0) continue;
            GroupElement g = W.at(key.first), h = W.at(key.second);
            if (std::min(G.box_norm(g), G.box_norm(h)) > margin_) continue;
            fold(G.word_distance(g, h), M);
        }
    }
    return env;
}

double WindowedOperator::self_adjoint_defect() const {
    if (!square()) throw std::runtime_error("self_adjoint_defect: operator is not square");
    OnScaling sc(cover_->base(), src_deg_, tgt_deg_);
    auto on = [&](const Eigen::MatrixXd& M) {
        return (sc.sqrt_wt.asDiagonal() * M * sc.inv_sqrt_ws.asDiagonal()).eval();
    };
    double worst = 0.0;
    if (invariant_) {
        const GroupModel& G = cover_->group();
        for (const auto& [o, M] : offsets_) {
            Eigen::MatrixXd a = on(M);
            auto it = offsets_.find(G.inverse(o));
            Eigen::MatrixXd b = Eigen::MatrixXd::Zero(a.rows(), a.cols());
            if (it != offsets_.end()) b = on(it->second).transpose();
            worst = std::max(worst, (a - b).array().abs().maxCoeff());
        }
    } else {
        const TileWindow& W = cover_->window();
        const GroupModel& G = cover_->group();
        for (const auto& [key, M] : blocks_) {
            GroupElement g = W.at(key.first), h = W.at(key.second);
            if (std::min(G.box_norm(g), G.box_norm(h)) > margin_) continue;
            Eigen::MatrixXd a = on(M);
            auto it = blocks_.find({key.second, key.first});
            Eigen::MatrixXd b = Eigen::MatrixXd::Zero(a.rows(), a.cols());
            if (it != blocks_.end()) b = on(it->second).transpose();
            worst = std::max(worst, (a - b).array().abs().maxCoeff());
        }
    }
    return worst;
}

void WindowedOperator::dump(std::ostream& os) const {
    os << "op " << src_deg_ << ' ' << tgt_deg_ << ' ' << radius_ << ' ';
    if (margin_ >= kFullMargin)
        os << "full";
    else
        os << margin_;
    os << ' ' << (invariant_ ? "inv" : "gen") << '\n';
    auto put = [&](const Eigen::MatrixXd& M) {
        os << M.rows() << ' ' << M.cols() << '\n';
        for (Eigen::Index r = 0; r < M.rows(); ++r) {
            for (Eigen::Index c = 0; c < M.cols(); ++c) {
                if (c) os << ' ';
                os << fmt17(M(r, c));
            }
            os << '\n';
        }
    };
    if (invariant_) {
        for (const auto& [o, M] : offsets_) {
            os << "off";
            for (auto v : o.c) os << ' ' << v;
            os << ' ';
            put(M);
        }
    } else {
        const TileWindow& W = cover_->window();
        for (const auto& [key, M] : blocks_) {
            GroupElement g = W.at(key.first), h = W.at(key.second);
            os << "blk";
            for (auto v : g.c) os << ' ' << v;
            for (auto v : h.c) os << ' ' << v;
            os << ' ';
            put(M);
        }
    }
}

// ---------------------------------------------------------------------------
// differential complexes

WindowedOperator DifferentialComplex::laplacian(int k) const {
    if (!cover) throw std::runtime_error("laplacian: empty complex");
    if (k < 0 || k > cover->dim()) throw std::runtime_error("laplacian: degree out of range");
    const int top = cover->dim();
    bool has_up = k < top, has_down = k > 0;
    if (has_up && has_down)
        return add(compose(adjoint(d[static_cast<std::size_t>(k)]), d[static_cast<std::size_t>(k)]),
                   compose(d[static_cast<std::size_t>(k - 1)],
                           adjoint(d[static_cast<std::size_t>(k - 1)])));
    if (has_up)
        return compose(adjoint(d[static_cast<std::size_t>(k)]), d[static_cast<std::size_t>(k)]);
    if (has_down)
        return compose(d[static_cast<std::size_t>(k - 1)],
                       adjoint(d[static_cast<std::size_t>(k - 1)]));
    return WindowedOperator::zero(cover, k, k);
}

DifferentialComplex assemble_coboundary(CoverPtr cover) {
    DifferentialComplex D;
    D.cover = cover;
    const BaseComplex& base = cover->base();
    const GroupModel& G = cover->group();
    for (int k = 0; k + 1 <= base.dim(); ++k) {
        std::map<GroupElement, Eigen::MatrixXd> off;
        for (const Incidence& inc : base.incidences(k + 1)) {
            GroupElement o = G.make(std::vector<std::int64_t>(inc.offset.begin(),
                                                              inc.offset.end()));
            GroupElement key = G.inverse(o);
            auto [it, fresh] = off.try_emplace(
                key, Eigen::MatrixXd::Zero(base.cells(k + 1), base.cells(k)));
            it->second(inc.cell, inc.face) += static_cast<double>(inc.sign);
        }
        D.d.push_back(WindowedOperator::from_offsets(cover, k, k + 1, std::move(off)));
    }
    return D;
}

WindowedOperator coboundary(CoverPtr cover, int k) {
    if (k < 0 || k >= cover->dim())
        throw std::runtime_error("coboundary: degree out of range");
    return assemble_coboundary(cover).d[static_cast<std::size_t>(k)];
}

// ---------------------------------------------------------------------------
// commutator defect

namespace {

// Number of tiles within word distance r of the Folner box boundary (both
// sides). Exact count; zero when the box is the whole group.
unsigned long long thick_tile_count(const GroupModel& G, int k, int r) {
    if (!G.is_lattice()) return 0;
    int d = G.rank();
    auto box_count = [&](long long radius) -> unsigned long long {
        if (radius < 0) return 0;
        unsigned long long n = 1;
        for (int i = 0; i < d; ++i) n *= static_cast<unsigned long long>(2 * radius + 1);
        return n;
    };
    unsigned long long full = box_count(k);
    unsigned long long inner = full - box_count(static_cast<long long>(k) - r);
    // outside: count l1-excess vectors via a small DP over dimensions
    std::vector<unsigned long long> ways(static_cast<std::size_t>(r) + 1, 0);
    ways[0] = 1;
    for (int i = 0; i < d; ++i) {
        std::vector<unsigned long long> nxt(ways.size(), 0);
        for (std::size_t b = 0; b < ways.size(); ++b) {
            if (!ways[b]) continue;
            for (std::size_t t = 0; b + t < nxt.size(); ++t) {
                unsigned long long c =
                    (t == 0) ? static_cast<unsigned long long>(2 * k + 1) : 2ull;
                nxt[b + t] += ways[b] * c;
            }
        }
        ways.swap(nxt);
    }
    unsigned long long within = 0;
    for (unsigned long long w : ways) within += w;
    return inner + (within - full);
}

} // namespace

CommutatorReport trace_commutator_defect(const WindowedOperator& A,
                                         const WindowedOperator& B, int k_min,
                                         int k_max) {
    if (B.src_deg() != A.tgt_deg() || B.tgt_deg() != A.src_deg())
        throw std::runtime_error(
            "trace_commutator_defect: A and B must be composable both ways");
    const GroupModel& G = A.cover()->group();

    WindowedOperator AB = compose(A, B), BA = compose(B, A);
    TileFunction defect = AB.piecewise_trace() - BA.piecewise_trace();

    CommutatorReport rep;
    rep.norm_product = A.opnorm_bound() * B.opnorm_bound();
    int r = std::min(A.radius(), B.radius());
    double ball = static_cast<double>(G.ball_size(r));
    int m_min = std::min(A.cover()->tile_cells(A.src_deg()),
                         A.cover()->tile_cells(A.tgt_deg()));
    double fp_slack = 64.0 * DBL_EPSILON * m_min * ball * rep.norm_product;

    std::vector<std::pair<int, double>> pts;
    for (int k = k_min; k <= k_max; ++k) {
        double avg = folner_average(G, defect, k);
        double thick = static_cast<double>(thick_tile_count(G, k, r));
        double bound =
            rep.norm_product * m_min * thick * ball / static_cast<double>(G.folner_size(k)) +
            fp_slack;
        rep.ks.push_back(k);
        rep.defects.push_back(avg);
        rep.bounds.push_back(bound);
        pts.emplace_back(k, avg);
    }
    rep.fit = fit_power_decay(pts);
    return rep;
}

// ---------------------------------------------------------------------------
// random operators and decay classification

WindowedOperator random_invariant_operator(CoverPtr cover, int src_deg, int tgt_deg,
                                           int radius, SplitMix64& rng) {
    const GroupModel& G = cover->group();
    int mr = cover->tile_cells(tgt_deg), mc = cover->tile_cells(src_deg);
    std::map<GroupElement, Eigen::MatrixXd> off;
    for (const GroupElement& o : G.box_elements(radius)) {
        Eigen::MatrixXd M(mr, mc);
        for (int r = 0; r < mr; ++r)
            for (int c = 0; c < mc; ++c) M(r, c) = rng.next_in(-1.0, 1.0);
        off[o] = std::move(M);
    }
    return WindowedOperator::from_offsets(std::move(cover), src_deg, tgt_deg,
                                          std::move(off));
}

WindowedOperator random_general_operator(CoverPtr cover, int src_deg, int tgt_deg,
                                         int radius, SplitMix64& rng) {
    const TileWindow& W = cover->window();
    const GroupModel& G = cover->group();
    int mr = cover->tile_cells(tgt_deg), mc = cover->tile_cells(src_deg);
    std::map<std::pair<int, int>, Eigen::MatrixXd> blocks;
    for (int gi = 0; gi < W.count(); ++gi) {
        for (int hi = 0; hi < W.count(); ++hi) {
            if (G.word_distance(W.at(gi), W.at(hi)) > radius) continue;
            Eigen::MatrixXd M(mr, mc);
            for (int r = 0; r < mr; ++r)
                for (int c = 0; c < mc; ++c) M(r, c) = rng.next_in(-1.0, 1.0);
            blocks[{gi, hi}] = std::move(M);
        }
    }
    int margin = W.radius() - radius;
    return WindowedOperator::from_blocks(std::move(cover), src_deg, tgt_deg,
                                         std::move(blocks), radius, margin);
}

WindowedOperator halfline_cut(const WindowedOperator& A) {
    const CoverPtr& cover = A.cover();
    const TileWindow& W = cover->window();
    const GroupModel& G = cover->group();
    if (!G.is_lattice())
        throw std::runtime_error("halfline_cut: needs an infinite (lattice) deck group");
    std::map<std::pair<int, int>, Eigen::MatrixXd> blocks;
    for (int gi = 0; gi < W.count(); ++gi) {
        GroupElement g = W.at(gi);
        if (g.c[0] > 0) continue;
        for (int hi = 0; hi < W.count(); ++hi) {
            const Eigen::MatrixXd* M = A.block(g, W.at(hi));
            if (M && M->size() > 0) blocks[{gi, hi}] = *M;
        }
    }
    int margin = W.radius() - A.radius();
    if (!A.is_invariant()) margin = std::min(margin, A.margin());
    return WindowedOperator::from_blocks(cover, A.src_deg(), A.tgt_deg(),
                                         std::move(blocks), A.radius(), margin);
}

Eigen::MatrixXd to_dense_on(const WindowedOperator& A) {
    const TileWindow& W = A.cover()->window();
    OnScaling sc(A.cover()->base(), A.src_deg(), A.tgt_deg());
    int mr = A.rows_per_tile(), mc = A.cols_per_tile();
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(W.count()) * mr,
                                              static_cast<Eigen::Index>(W.count()) * mc);
    for (int gi = 0; gi < W.count(); ++gi) {
        GroupElement g = W.at(gi);
        for (int hi = 0; hi < W.count(); ++hi) {
            const Eigen::MatrixXd* M = A.block(g, W.at(hi));
            if (M && M->size() > 0)
                D.block(static_cast<Eigen::Index>(gi) * mr, static_cast<Eigen::Index>(hi) * mc,
                        mr, mc) = sc.on(*M);
        }
    }
    return D;
}

DecayFit decay_fit(const WindowedOperator& A) {
    DecayFit out;
    out.envelope = A.distance_envelope();
    double maxv = 0.0;
    for (double v : out.envelope) maxv = std::max(maxv, v);
    if (maxv == 0.0) return out; // zero operator: flat, not classified

    // Bands at roundoff level relative to the dominant entry carry quadrature
    // noise rather than operator structure; they are excluded from the fit
    // and the envelope certificate.
    const double floor = 1e-14 * maxv;
    std::vector<std::pair<double, double>> pts; // (d^2, log band max)
    for (std::size_t d = 0; d < out.envelope.size(); ++d)
        if (out.envelope[d] > floor)
            pts.emplace_back(static_cast<double>(d) * static_cast<double>(d),
                             std::log(out.envelope[d]));

    out.C1 = maxv;
    if (pts.size() < 2) {
        out.C2 = 0.0;
        out.r2 = 1.0;
        out.gaussian_class = false;
        return out;
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto& [x, y] : pts) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double n = static_cast<double>(pts.size());
    double den = n * sxx - sx * sx;
    if (den <= 0.0) {
        out.C2 = 0.0;
        out.r2 = 1.0;
        out.gaussian_class = false;
        return out;
    }
    double slope = (n * sxy - sx * sy) / den;
    double icept = (sy - slope * sx) / n;
    out.C2 = -slope;
    double ss_res = 0, ss_tot = 0, ymean = sy / n;
    for (auto& [x, y] : pts) {
        double e = y - (icept + slope * x);
        ss_res += e * e;
        ss_tot += (y - ymean) * (y - ymean);
    }
    out.r2 = (ss_tot > 0) ? 1.0 - ss_res / ss_tot : 1.0;

    // smallest constant making the fitted envelope dominate the observed bands
    double c1 = 0.0;
    for (auto& [x, y] : pts) c1 = std::max(c1, std::exp(y + out.C2 * x));
    out.C1 = c1;
    bool holds = out.C2 > 0.0;
    for (auto& [x, y] : pts)
        if (std::exp(y) > out.C1 * std::exp(-out.C2 * x) * (1.0 + 1e-6)) holds = false;
    out.gaussian_class = holds;
    return out;
}

} // namespace l2morse
