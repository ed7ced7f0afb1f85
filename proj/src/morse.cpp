#include "l2morse/morse.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "l2morse/util.hpp"

namespace l2morse {

namespace {

double frac(double x) { return x - std::floor(x); }

std::string cell_name(int k, int id, const GroupElement& tile) {
    std::ostringstream os;
    os << "(k=" << k << ", id=" << id << ", tile=" << to_string(tile) << ")";
    return os.str();
}

// Verifies the circular base structure the pattern builders rely on: p
// vertices, p edges, edge i bounded by -v_i and +v_{i+1}, the last edge
// closing up through a deck offset. Returns p.
int circle_cell_count(const BaseComplex& base, const char* who) {
    auto fail = [&](const std::string& why) {
        throw std::runtime_error(std::string(who) + ": needs the circular base structure (" +
                                 why + ")");
    };
    if (base.dim() != 1) fail("dimension is not 1");
    int p = base.cells(0);
    if (p < 1 || base.cells(1) != p) fail("cell counts differ");
    std::vector<std::pair<int, int>> neg(static_cast<std::size_t>(p), {-1, 0}),
        pos(static_cast<std::size_t>(p), {-1, 0});
    for (const Incidence& inc : base.incidences(1)) {
        std::int64_t shift = 0;
        for (auto v : inc.offset) shift += std::abs(v);
        auto& slot = (inc.sign > 0) ? pos[static_cast<std::size_t>(inc.cell)]
                                    : neg[static_cast<std::size_t>(inc.cell)];
        if (slot.first >= 0) fail("an edge has a repeated boundary sign");
        slot = {inc.face, static_cast<int>(shift)};
    }
    for (int i = 0; i < p; ++i) {
        bool last = (i == p - 1);
        if (neg[static_cast<std::size_t>(i)].first != i ||
            neg[static_cast<std::size_t>(i)].second != 0)
            fail("edge " + std::to_string(i) + " does not start at its vertex");
        int want_face = last ? 0 : i + 1;
        int want_shift = last ? 1 : 0;
        if (pos[static_cast<std::size_t>(i)].first != want_face ||
            pos[static_cast<std::size_t>(i)].second != want_shift)
            fail("edge " + std::to_string(i) + " does not end at the next vertex");
    }
    return p;
}

} // namespace

// ---------------------------------------------------------------------------
// CellFunction

double CellFunction::at(int k, int tile_idx, int cell) const {
    if (invariant_) return base_[static_cast<std::size_t>(k)][static_cast<std::size_t>(cell)];
    int m = cover_->tile_cells(k);
    return vals_[static_cast<std::size_t>(k)]
                [static_cast<std::size_t>(tile_idx) * static_cast<std::size_t>(m) +
                 static_cast<std::size_t>(cell)];
}

CellFunction CellFunction::invariant_from_base(CoverPtr cover,
                                               std::vector<std::vector<double>> base_vals) {
    CellFunction f;
    f.cover_ = std::move(cover);
    const BaseComplex& base = f.cover_->base();
    if (static_cast<int>(base_vals.size()) != base.dim() + 1)
        throw std::runtime_error("invariant_from_base: one value vector per degree required");
    for (int k = 0; k <= base.dim(); ++k)
        if (static_cast<int>(base_vals[static_cast<std::size_t>(k)].size()) != base.cells(k))
            throw std::runtime_error("invariant_from_base: value count mismatch at degree " +
                                     std::to_string(k));
    f.invariant_ = true;
    f.global_ = true;
    f.base_ = std::move(base_vals);
    f.lo_ = std::numeric_limits<double>::infinity();
    f.hi_ = -f.lo_;
    for (const auto& per_deg : f.base_)
        for (double v : per_deg) {
            f.lo_ = std::min(f.lo_, v);
            f.hi_ = std::max(f.hi_, v);
        }
    if (f.base_.empty() || f.base_[0].empty()) f.lo_ = f.hi_ = 0.0;
    double gap = 0.0;
    for (int k = 1; k <= base.dim(); ++k)
        for (const Incidence& inc : base.incidences(k))
            gap = std::max(gap, std::abs(f.base_[static_cast<std::size_t>(k)]
                                                [static_cast<std::size_t>(inc.cell)] -
                                         f.base_[static_cast<std::size_t>(k - 1)]
                                                [static_cast<std::size_t>(inc.face)]));
    f.gap_bound_ = gap;
    return f;
}

CellFunction CellFunction::from_values(CoverPtr cover,
                                       std::vector<std::vector<double>> vals) {
    CellFunction f;
    f.cover_ = std::move(cover);
    const BaseComplex& base = f.cover_->base();
    const TileWindow& W = f.cover_->window();
    if (static_cast<int>(vals.size()) != base.dim() + 1)
        throw std::runtime_error("from_values: one value vector per degree required");
    for (int k = 0; k <= base.dim(); ++k)
        if (vals[static_cast<std::size_t>(k)].size() != f.cover_->total_cells(k))
            throw std::runtime_error("from_values: value count mismatch at degree " +
                                     std::to_string(k));
    f.invariant_ = false;
    f.global_ = false;
    f.vals_ = std::move(vals);
    f.lo_ = std::numeric_limits<double>::infinity();
    f.hi_ = -f.lo_;
    bool any = false;
    for (const auto& per_deg : f.vals_)
        for (double v : per_deg) {
            f.lo_ = std::min(f.lo_, v);
            f.hi_ = std::max(f.hi_, v);
            any = true;
        }
    if (!any) f.lo_ = f.hi_ = 0.0;
    const GroupModel& G = f.cover_->group();
    double gap = 0.0;
    for (int k = 1; k <= base.dim(); ++k) {
        int m = base.cells(k), mf = base.cells(k - 1);
        for (int ti = 0; ti < W.count(); ++ti) {
            GroupElement g = W.at(ti);
            for (const Incidence& inc : base.incidences(k)) {
                int hi = W.index(G.mul(g, G.make(inc.offset)));
                if (hi < 0) continue;
                double fc = f.vals_[static_cast<std::size_t>(k)]
                                   [static_cast<std::size_t>(ti * m + inc.cell)];
                double ff = f.vals_[static_cast<std::size_t>(k - 1)]
                                   [static_cast<std::size_t>(hi * mf + inc.face)];
                gap = std::max(gap, std::abs(fc - ff));
            }
        }
    }
    f.gap_bound_ = gap;
    return f;
}

// ---------------------------------------------------------------------------
// DiscreteMorseData

int DiscreteMorseData::matched_up(int k, int cover_cell) const {
    const auto& up = up_[static_cast<std::size_t>(k)];
    if (invariant()) {
        int m = cover()->tile_cells(k);
        int ti = cover_cell / m, id = cover_cell % m;
        int partner = up[static_cast<std::size_t>(id)];
        if (partner < 0) return -1;
        return ti * cover()->tile_cells(k + 1) + partner;
    }
    return up[static_cast<std::size_t>(cover_cell)];
}

int DiscreteMorseData::matched_down(int k, int cover_cell) const {
    const auto& dn = down_[static_cast<std::size_t>(k)];
    if (invariant()) {
        int m = cover()->tile_cells(k);
        int ti = cover_cell / m, id = cover_cell % m;
        int partner = dn[static_cast<std::size_t>(id)];
        if (partner < 0) return -1;
        return ti * cover()->tile_cells(k - 1) + partner;
    }
    return dn[static_cast<std::size_t>(cover_cell)];
}

bool DiscreteMorseData::is_critical(int k, int cover_cell) const {
    int dim = cover()->dim();
    if (k < dim && matched_up(k, cover_cell) >= 0) return false;
    if (k > 0 && matched_down(k, cover_cell) >= 0) return false;
    return true;
}

TileFunction DiscreteMorseData::critical_count(int k) const {
    int m = cover()->tile_cells(k);
    if (invariant()) {
        int n = 0;
        for (int id = 0; id < m; ++id) {
            bool up_free = up_[static_cast<std::size_t>(k)][static_cast<std::size_t>(id)] < 0;
            bool dn_free = down_[static_cast<std::size_t>(k)][static_cast<std::size_t>(id)] < 0;
            if (up_free && dn_free) ++n;
        }
        return TileFunction::constant(static_cast<double>(n));
    }
    const TileWindow& W = cover()->window();
    std::map<GroupElement, double> vals;
    for (int ti = 0; ti < W.count(); ++ti) {
        int n = 0;
        for (int id = 0; id < m; ++id)
            if (is_critical(k, ti * m + id)) ++n;
        vals[W.at(ti)] = static_cast<double>(n);
    }
    return TileFunction::windowed(std::move(vals));
}

MorseGaps DiscreteMorseData::validate() const {
    const CoverPtr& cv = cover();
    const BaseComplex& base = cv->base();
    const TileWindow& W = cv->window();
    const GroupModel& G = cv->group();
    MorseGaps gaps;
    gaps.min_matched = std::numeric_limits<double>::infinity();
    gaps.min_regular = gaps.min_matched;

    // matched pairs whose incidence was actually seen during the sweep
    std::vector<std::vector<char>> seen(static_cast<std::size_t>(base.dim()) + 1);
    for (int k = 0; k <= base.dim(); ++k)
        seen[static_cast<std::size_t>(k)].assign(cv->total_cells(k), 0);

    for (int k = 1; k <= base.dim(); ++k) {
        int m = base.cells(k), mf = base.cells(k - 1);
        for (int ti = 0; ti < W.count(); ++ti) {
            GroupElement g = W.at(ti);
            for (const Incidence& inc : base.incidences(k)) {
                int hi = W.index(G.mul(g, G.make(inc.offset)));
                if (hi < 0) continue;
                int cell_idx = ti * m + inc.cell;
                int face_idx = hi * mf + inc.face;
                double fc = f_.at(k, ti, inc.cell);
                double ff = f_.at(k - 1, hi, inc.face);
                if (matched_up(k - 1, face_idx) == cell_idx) {
                    seen[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(face_idx)] = 1;
                    double gap = ff - fc;
                    if (gap < 0.0)
                        throw std::runtime_error(
                            "morse validation: matched pair must not increase, but f" +
                            cell_name(k, inc.cell, g) + " = " + fmt17(fc) + " > f" +
                            cell_name(k - 1, inc.face, W.at(hi)) + " = " + fmt17(ff));
                    gaps.min_matched = std::min(gaps.min_matched, gap);
                } else {
                    double gap = fc - ff;
                    if (gap <= 0.0)
                        throw std::runtime_error(
                            "morse validation: regular incidence must strictly increase, "
                            "but f" +
                            cell_name(k, inc.cell, g) + " = " + fmt17(fc) + " <= f" +
                            cell_name(k - 1, inc.face, W.at(hi)) + " = " + fmt17(ff));
                    gaps.min_regular = std::min(gaps.min_regular, gap);
                }
            }
        }
    }

    for (int k = 0; k < base.dim(); ++k) {
        int m = base.cells(k);
        for (int ti = 0; ti < W.count(); ++ti) {
            for (int id = 0; id < m; ++id) {
                int ci = ti * m + id;
                if (matched_up(k, ci) >= 0 && !seen[static_cast<std::size_t>(k)]
                                                   [static_cast<std::size_t>(ci)])
                    throw std::runtime_error(
                        "morse validation: matched cells are not incident at cell " +
                        cell_name(k, id, W.at(ti)));
            }
        }
    }
    return gaps;
}

// ---------------------------------------------------------------------------
// builders

DiscreteMorseData make_zigzag_morse(CoverPtr cover, int c) {
    int p = circle_cell_count(cover->base(), "invariant zig-zag pattern");
    if (c < 1 || c > p)
        throw std::runtime_error(
            "invariant zig-zag pattern: critical count must be in [1, " +
            std::to_string(p) + "]");
    int q = p - c; // matched pairs per tile
    std::vector<double> fv(static_cast<std::size_t>(p)), fe(static_cast<std::size_t>(p));
    std::vector<int> up0(static_cast<std::size_t>(p), -1), dn1(static_cast<std::size_t>(p), -1);
    for (int i = 0; i < p; ++i) fv[static_cast<std::size_t>(i)] = 0.5 * i;
    for (int i = 0; i < p; ++i) {
        if (i < q) {
            fe[static_cast<std::size_t>(i)] = 0.5 * (i + 1) - 0.2;
            up0[static_cast<std::size_t>(i + 1)] = i;
            dn1[static_cast<std::size_t>(i)] = i + 1;
        } else {
            fe[static_cast<std::size_t>(i)] = 0.5 * (p - 1) + 0.2 + 0.5 * (i - q);
        }
    }
    DiscreteMorseData M;
    M.f_ = CellFunction::invariant_from_base(cover, {fv, fe});
    M.up_ = {up0, std::vector<int>(static_cast<std::size_t>(p), -1)};
    M.down_ = {std::vector<int>(static_cast<std::size_t>(p), -1), dn1};
    return M;
}

DiscreteMorseData make_quasiperiodic_morse(CoverPtr cover, double alpha,
                                           double amplitude) {
    int p = circle_cell_count(cover->base(), "quasiperiodic pattern");
    if (p != 3)
        throw std::runtime_error(
            "quasiperiodic pattern: defined on the 3-cell circular base only");
    if (!(amplitude >= 0.0 && amplitude <= 0.6))
        throw std::runtime_error(
            "quasiperiodic pattern: amplitude must lie in [0, 0.6] to keep the "
            "cross-tile inequalities valid on the whole cover");

    // variant tables: values and in-tile matchings
    const double va_v[3] = {0.0, 0.5, 1.0}, va_e[3] = {0.3, 0.8, 1.2};
    const int va_up[3] = {-1, 0, 1}, va_dn[3] = {1, 2, -1};
    const double vc_v[3] = {0.0, 0.0, 0.5}, vc_e[3] = {0.2, 0.3, 0.7};
    const int vc_up[3] = {-1, -1, 1}, vc_dn[3] = {-1, 2, -1};

    const TileWindow& W = cover->window();
    std::vector<std::vector<double>> vals(2);
    vals[0].assign(static_cast<std::size_t>(W.count()) * 3, 0.0);
    vals[1].assign(static_cast<std::size_t>(W.count()) * 3, 0.0);
    std::vector<std::vector<int>> up(2), dn(2);
    up[0].assign(static_cast<std::size_t>(W.count()) * 3, -1);
    up[1].assign(static_cast<std::size_t>(W.count()) * 3, -1);
    dn[0] = up[0];
    dn[1] = up[0];

    for (int ti = 0; ti < W.count(); ++ti) {
        GroupElement g = W.at(ti);
        double s = 0.0;
        for (auto v : g.c) s += static_cast<double>(v);
        double phi = frac(alpha * s);
        bool variant_a = phi < 0.5;
        double shift = amplitude * phi;
        for (int i = 0; i < 3; ++i) {
            vals[0][static_cast<std::size_t>(ti * 3 + i)] =
                (variant_a ? va_v[i] : vc_v[i]) + shift;
            vals[1][static_cast<std::size_t>(ti * 3 + i)] =
                (variant_a ? va_e[i] : vc_e[i]) + shift;
            int u = variant_a ? va_up[i] : vc_up[i];
            int d = variant_a ? va_dn[i] : vc_dn[i];
            if (u >= 0) up[0][static_cast<std::size_t>(ti * 3 + i)] = ti * 3 + u;
            if (d >= 0) dn[1][static_cast<std::size_t>(ti * 3 + i)] = ti * 3 + d;
        }
    }

    DiscreteMorseData M;
    M.f_ = CellFunction::from_values(cover, std::move(vals));
    // the builder vouches for the whole cover: the variant tables and the
    // shift keep every inequality valid independently of the tile, and the
    // largest incidence gap is the wrap gap plus the shift amplitude
    M.f_.global_ = true;
    M.f_.lo_ = 0.0;
    M.f_.hi_ = 1.2 + amplitude;
    M.f_.gap_bound_ = 1.2 + amplitude;
    M.up_ = std::move(up);
    M.down_ = std::move(dn);
    return M;
}

DiscreteMorseData morse_from_file(CoverPtr cover, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("morse_from_file: cannot open " + path);
    const BaseComplex& base = cover->base();
    const TileWindow& W = cover->window();
    const GroupModel& G = cover->group();
    const int d = G.rank();

    std::vector<std::vector<double>> vals(static_cast<std::size_t>(base.dim()) + 1);
    std::vector<std::vector<char>> have(static_cast<std::size_t>(base.dim()) + 1);
    std::vector<std::vector<int>> up(static_cast<std::size_t>(base.dim()) + 1),
        dn(static_cast<std::size_t>(base.dim()) + 1);
    for (int k = 0; k <= base.dim(); ++k) {
        vals[static_cast<std::size_t>(k)].assign(cover->total_cells(k), 0.0);
        have[static_cast<std::size_t>(k)].assign(cover->total_cells(k), 0);
        up[static_cast<std::size_t>(k)].assign(cover->total_cells(k), -1);
        dn[static_cast<std::size_t>(k)].assign(cover->total_cells(k), -1);
    }

    auto err = [&](int line, const std::string& why) {
        throw std::runtime_error(path + ":" + std::to_string(line) + ": " + why);
    };
    auto to_int = [&](const std::string& s, int line) -> std::int64_t {
        const char* b = s.c_str();
        char* end = nullptr;
        long long v = std::strtoll(b, &end, 10);
        if (end == b || *end != '\0') err(line, "expected an integer, got '" + s + "'");
        return v;
    };
    auto to_double = [&](const std::string& s, int line) -> double {
        const char* b = s.c_str();
        char* end = nullptr;
        double v = std::strtod(b, &end);
        if (end == b || *end != '\0') err(line, "expected a number, got '" + s + "'");
        return v;
    };
    auto parse_cell = [&](const std::vector<std::string>& tok, std::size_t at, int line,
                          int k) -> int {
        std::int64_t id = to_int(tok[at], line);
        if (id < 0 || id >= base.cells(k)) err(line, "cell id out of range");
        std::vector<std::int64_t> coords;
        for (int i = 0; i < d; ++i)
            coords.push_back(to_int(tok[at + 1 + static_cast<std::size_t>(i)], line));
        int ti = W.index(G.make(coords));
        if (ti < 0) err(line, "tile outside the materialized window");
        return ti * base.cells(k) + static_cast<int>(id);
    };

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        std::vector<std::string> tok;
        for (std::string t; ls >> t;) tok.push_back(t);
        if (tok.empty()) continue;
        if (tok[0] == "f") {
            if (tok.size() != static_cast<std::size_t>(4 + d)) err(lineno, "malformed f record");
            int k = static_cast<int>(to_int(tok[1], lineno));
            if (k < 0 || k > base.dim()) err(lineno, "degree out of range");
            int ci = parse_cell(tok, 2, lineno, k);
            if (have[static_cast<std::size_t>(k)][static_cast<std::size_t>(ci)])
                err(lineno, "duplicate value for a cell");
            vals[static_cast<std::size_t>(k)][static_cast<std::size_t>(ci)] =
                to_double(tok[tok.size() - 1], lineno);
            have[static_cast<std::size_t>(k)][static_cast<std::size_t>(ci)] = 1;
        } else if (tok[0] == "match") {
            if (tok.size() != static_cast<std::size_t>(4 + 2 * d))
                err(lineno, "malformed match record");
            int k = static_cast<int>(to_int(tok[1], lineno));
            if (k < 0 || k >= base.dim()) err(lineno, "match degree out of range");
            int lo_idx = parse_cell(tok, 2, lineno, k);
            int hi_idx = parse_cell(tok, static_cast<std::size_t>(3 + d), lineno, k + 1);
            if (up[static_cast<std::size_t>(k)][static_cast<std::size_t>(lo_idx)] >= 0)
                err(lineno, "cell matched twice");
            if (dn[static_cast<std::size_t>(k) + 1][static_cast<std::size_t>(hi_idx)] >= 0)
                err(lineno, "cell matched twice");
            up[static_cast<std::size_t>(k)][static_cast<std::size_t>(lo_idx)] = hi_idx;
            dn[static_cast<std::size_t>(k) + 1][static_cast<std::size_t>(hi_idx)] = lo_idx;
        } else {
            err(lineno, "unknown record '" + tok[0] + "'");
        }
    }
    for (int k = 0; k <= base.dim(); ++k)
        for (std::size_t i = 0; i < have[static_cast<std::size_t>(k)].size(); ++i)
            if (!have[static_cast<std::size_t>(k)][i])
                throw std::runtime_error(path + ": missing value for cell (k=" +
                                         std::to_string(k) + ", index " +
                                         std::to_string(i) + ")");

    DiscreteMorseData M;
    M.f_ = CellFunction::from_values(std::move(cover), std::move(vals));
    M.up_ = std::move(up);
    M.down_ = std::move(dn);
    return M;
}

// ---------------------------------------------------------------------------
// Witten deformation

DifferentialComplex witten_deform(const DifferentialComplex& D, const CellFunction& f,
                                  double t) {
    if (!D.cover) throw std::runtime_error("witten_deform: empty complex");
    if (f.cover().get() != D.cover.get() &&
        !(f.cover()->window() == D.cover->window() &&
          f.cover()->base().name() == D.cover->base().name()))
        throw std::runtime_error("witten_deform: function lives on a different cover");
    double range = f.hi() - f.lo();
    if (t * range > 300.0)
        throw std::runtime_error(
            "witten_deform: overflow risk: t * value range = " + fmt17(t * range) +
            " > 300");

    const CoverPtr& cover = D.cover;
    const GroupModel& G = cover->group();
    const TileWindow& W = cover->window();

    DifferentialComplex E;
    E.cover = cover;
    for (std::size_t kk = 0; kk < D.d.size(); ++kk) {
        int k = static_cast<int>(kk);
        const WindowedOperator& dk = D.d[kk];
        if (dk.is_invariant() && f.invariant()) {
            std::map<GroupElement, Eigen::MatrixXd> off;
            for (const auto& [o, M] : dk.offset_blocks()) {
                Eigen::MatrixXd S = M;
                for (Eigen::Index col = 0; col < S.cols(); ++col)
                    for (Eigen::Index row = 0; row < S.rows(); ++row)
                        if (S(row, col) != 0.0)
                            S(row, col) *= std::exp(
                                t * (f.at(k, 0, static_cast<int>(col)) -
                                     f.at(k + 1, 0, static_cast<int>(row))));
                off[o] = std::move(S);
            }
            E.d.push_back(
                WindowedOperator::from_offsets(cover, k, k + 1, std::move(off)));
            continue;
        }
        // general storage: scale per (source tile, target tile), the function
        // value of every cell being read off the materialized window
        std::map<std::pair<int, int>, Eigen::MatrixXd> blocks;
        auto scale_into = [&](int gi, int hi, const Eigen::MatrixXd& M) {
            Eigen::MatrixXd S = M;
            for (Eigen::Index col = 0; col < S.cols(); ++col)
                for (Eigen::Index row = 0; row < S.rows(); ++row)
                    if (S(row, col) != 0.0)
                        S(row, col) *= std::exp(t * (f.at(k, hi, static_cast<int>(col)) -
                                                     f.at(k + 1, gi, static_cast<int>(row))));
            blocks[{gi, hi}] = std::move(S);
        };
        int margin;
        if (dk.is_invariant()) {
            for (int gi = 0; gi < W.count(); ++gi) {
                GroupElement g = W.at(gi);
                for (const auto& [o, M] : dk.offset_blocks()) {
                    int hi = W.index(G.mul(g, G.inverse(o)));
                    if (hi >= 0) scale_into(gi, hi, M);
                }
            }
            margin = W.radius() - dk.radius();
        } else {
            for (const auto& [key, M] : dk.indexed_blocks())
                scale_into(key.first, key.second, M);
            margin = std::min(dk.margin(), W.radius() - dk.radius());
        }
        E.d.push_back(WindowedOperator::from_blocks(cover, k, k + 1, std::move(blocks),
                                                    dk.radius(), margin));
    }

    // Certified spectral bounds: an invariant result is represented exactly by
    // its offsets, so its own norm bound is global; otherwise fall back to
    // ||d_t|| <= ||d|| exp(t sup|f(face)-f(cell)|), valid when the function
    // vouches for the whole cover.
    std::vector<double> bd(D.d.size(), -1.0);
    for (std::size_t kk = 0; kk < D.d.size(); ++kk) {
        if (E.d[kk].is_invariant())
            bd[kk] = E.d[kk].opnorm_bound();
        else if (f.certificates_global() && D.d[kk].is_invariant())
            bd[kk] = D.d[kk].opnorm_bound() * std::exp(t * f.gap_bound());
    }
    bool all_certified = true;
    for (double b : bd)
        if (b < 0.0) all_certified = false;
    if (all_certified && !bd.empty()) {
        E.lam_bound.assign(static_cast<std::size_t>(cover->dim()) + 1, 0.0);
        for (int k = 0; k <= cover->dim(); ++k) {
            double b = 0.0;
            if (k < cover->dim()) b += bd[static_cast<std::size_t>(k)] * bd[static_cast<std::size_t>(k)];
            if (k > 0) b += bd[static_cast<std::size_t>(k - 1)] * bd[static_cast<std::size_t>(k - 1)];
            E.lam_bound[static_cast<std::size_t>(k)] = b;
        }
    }
    return E;
}

} // namespace l2morse
