#include "l2morse/complex.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace l2morse {

int BaseComplex::cells(int k) const {
    if (k < 0 || k > dim()) return 0;
    return counts_[static_cast<size_t>(k)];
}

const std::vector<double>& BaseComplex::weights(int k) const {
    if (k < 0 || k > dim()) throw std::out_of_range("base: degree out of range");
    return weights_[static_cast<size_t>(k)];
}

const std::vector<Incidence>& BaseComplex::incidences(int k) const {
    static const std::vector<Incidence> empty;
    if (k < 1 || k > dim()) return empty;
    return incidences_[static_cast<size_t>(k)];
}

long long BaseComplex::euler() const {
    long long chi = 0;
    for (int k = 0; k <= dim(); ++k) chi += (k % 2 == 0 ? 1 : -1) * cells(k);
    return chi;
}

std::int64_t BaseComplex::offset_radius(const GroupModel& G) const {
    std::int64_t r = 0;
    for (int k = 1; k <= dim(); ++k)
        for (const auto& inc : incidences(k))
            r = std::max(r, G.word_norm(G.make(inc.offset)));
    return r;
}

void BaseComplex::set_degree_weight(int k, double w) {
    if (w <= 0.0) throw std::invalid_argument("base: weights must be positive");
    if (k < 0 || k > dim()) throw std::out_of_range("base: degree out of range");
    for (auto& x : weights_[static_cast<size_t>(k)]) x = w;
}

BaseComplex BaseComplex::circle(int p) {
    if (p < 1) throw std::invalid_argument("circle(p): p must be >= 1");
    BaseComplex b;
    b.name_ = "circle(" + std::to_string(p) + ")";
    b.offset_dim_ = 1;
    b.counts_ = {p, p};
    b.weights_ = {std::vector<double>(static_cast<size_t>(p), 1.0),
                  std::vector<double>(static_cast<size_t>(p), 1.0)};
    b.incidences_.resize(2);
    // edge i runs from vertex i to vertex i+1; the last edge reaches the next tile
    for (int i = 0; i < p; ++i) {
        const bool wrap = (i == p - 1);
        b.incidences_[1].push_back({i, wrap ? 0 : i + 1, +1, {wrap ? 1 : 0}});
        b.incidences_[1].push_back({i, i, -1, {0}});
    }
    b.validate_and_finalize(b.name_);
    return b;
}

BaseComplex BaseComplex::torus(int p, int q) {
    if (p < 1 || q < 1) throw std::invalid_argument("torus(p,q): sides must be >= 1");
    BaseComplex b;
    b.name_ = "torus(" + std::to_string(p) + "x" + std::to_string(q) + ")";
    b.offset_dim_ = 2;
    const int V = p * q;
    b.counts_ = {V, 2 * V, V};
    b.weights_ = {std::vector<double>(static_cast<size_t>(V), 1.0),
                  std::vector<double>(static_cast<size_t>(2 * V), 1.0),
                  std::vector<double>(static_cast<size_t>(V), 1.0)};
    b.incidences_.resize(3);
    auto vid = [&](int i, int j) { return (j % q) * p + (i % p); };
    auto hid = [&](int i, int j) { return (j % q) * p + (i % p); };         // edge v(i,j)->v(i+1,j)
    auto uid = [&](int i, int j) { return V + (j % q) * p + (i % p); };     // edge v(i,j)->v(i,j+1)
    for (int j = 0; j < q; ++j) {
        for (int i = 0; i < p; ++i) {
            const bool wi = (i == p - 1), wj = (j == q - 1);
            // horizontal edge boundary
            b.incidences_[1].push_back({hid(i, j), vid(i + 1, j), +1, {wi ? 1 : 0, 0}});
            b.incidences_[1].push_back({hid(i, j), vid(i, j), -1, {0, 0}});
            // vertical edge boundary
            b.incidences_[1].push_back({uid(i, j), vid(i, j + 1), +1, {0, wj ? 1 : 0}});
            b.incidences_[1].push_back({uid(i, j), vid(i, j), -1, {0, 0}});
            // square (i,j): d s = h(i,j) + u(i+1,j) - h(i,j+1) - u(i,j)
            const int s = vid(i, j);
            b.incidences_[2].push_back({s, hid(i, j), +1, {0, 0}});
            b.incidences_[2].push_back({s, uid(i + 1, j), +1, {wi ? 1 : 0, 0}});
            b.incidences_[2].push_back({s, hid(i, j + 1), -1, {0, wj ? 1 : 0}});
            b.incidences_[2].push_back({s, uid(i, j), -1, {0, 0}});
        }
    }
    b.validate_and_finalize(b.name_);
    return b;
}

BaseComplex BaseComplex::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("complex file: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

BaseComplex BaseComplex::parse(const std::string& text, const std::string& origin) {
    BaseComplex b;
    b.name_ = "file(" + origin + ")";
    b.offset_dim_ = -1;
    // collected records keyed by (degree, id) so we can check density
    std::map<std::pair<int, int>, double> cells;
    struct RawBnd {
        int k, cell, face, sign, line;
        std::vector<std::int64_t> off;
    };
    std::vector<RawBnd> bnds;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& msg) {
        throw std::runtime_error("complex file " + origin + ":" +
                                 std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        const auto h = line.find('#');
        if (h != std::string::npos) line.erase(h);
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;
        if (tag == "cell") {
            int k, id;
            double w;
            if (!(ls >> k >> id >> w)) fail("malformed cell record");
            std::string extra;
            if (ls >> extra) fail("trailing tokens on cell record");
            if (k < 0) fail("negative degree");
            if (id < 0) fail("negative cell id");
            if (w <= 0.0) fail("cell weight must be positive");
            if (!cells.emplace(std::make_pair(k, id), w).second)
                fail("duplicate cell " + std::to_string(k) + "/" + std::to_string(id));
        } else if (tag == "bnd") {
            RawBnd r;
            r.line = lineno;
            if (!(ls >> r.k >> r.cell >> r.face >> r.sign)) fail("malformed bnd record");
            if (r.k < 1) fail("bnd degree must be >= 1");
            if (r.sign != 1 && r.sign != -1) fail("bnd sign must be +1 or -1");
            std::int64_t o;
            while (ls >> o) r.off.push_back(o);
            if (r.off.empty()) fail("bnd record missing deck offset");
            if (b.offset_dim_ < 0)
                b.offset_dim_ = static_cast<int>(r.off.size());
            else if (static_cast<int>(r.off.size()) != b.offset_dim_)
                fail("inconsistent offset dimension");
            bnds.push_back(std::move(r));
        } else {
            fail("unknown record tag '" + tag + "'");
        }
    }
    if (cells.empty()) throw std::runtime_error("complex file " + origin + ": no cells");
    if (b.offset_dim_ < 0) b.offset_dim_ = 1; // no boundaries at all: 0-dim complex
    int dim = 0;
    for (const auto& [kid, w] : cells) dim = std::max(dim, kid.first);
    b.counts_.assign(static_cast<size_t>(dim) + 1, 0);
    for (const auto& [kid, w] : cells) {
        auto& cnt = b.counts_[static_cast<size_t>(kid.first)];
        cnt = std::max(cnt, kid.second + 1);
    }
    // ids must be dense 0..m_k-1
    for (int k = 0; k <= dim; ++k)
        for (int id = 0; id < b.counts_[static_cast<size_t>(k)]; ++id)
            if (!cells.count({k, id}))
                throw std::runtime_error("complex file " + origin + ": missing cell " +
                                         std::to_string(k) + "/" + std::to_string(id));
    b.weights_.resize(static_cast<size_t>(dim) + 1);
    for (int k = 0; k <= dim; ++k) {
        auto& wk = b.weights_[static_cast<size_t>(k)];
        wk.resize(static_cast<size_t>(b.counts_[static_cast<size_t>(k)]));
        for (int id = 0; id < b.counts_[static_cast<size_t>(k)]; ++id)
            wk[static_cast<size_t>(id)] = cells.at({k, id});
    }
    b.incidences_.resize(static_cast<size_t>(dim) + 1);
    for (const auto& r : bnds) {
        lineno = r.line;
        if (r.k > dim || r.cell >= b.counts_[static_cast<size_t>(r.k)])
            fail("bnd references nonexistent cell " + std::to_string(r.k) + "/" +
                 std::to_string(r.cell));
        if (r.face >= b.counts_[static_cast<size_t>(r.k - 1)] || r.face < 0)
            fail("bnd references nonexistent face " + std::to_string(r.k - 1) + "/" +
                 std::to_string(r.face));
        b.incidences_[static_cast<size_t>(r.k)].push_back(
            {r.cell, r.face, r.sign, r.off});
    }
    b.validate_and_finalize(origin);
    return b;
}

// dd = 0 over the free deck module: for every k-cell, accumulate signed counts
// on (face, combined-offset) pairs of the double boundary; all must cancel.
void BaseComplex::validate_and_finalize(const std::string& origin) {
    for (int k = 2; k <= dim(); ++k) {
        for (int c = 0; c < cells(k); ++c) {
            std::map<std::pair<int, std::vector<std::int64_t>>, long long> acc;
            for (const auto& i1 : incidences(k)) {
                if (i1.cell != c) continue;
                for (const auto& i2 : incidences(k - 1)) {
                    if (i2.cell != i1.face) continue;
                    std::vector<std::int64_t> o(i1.offset);
                    for (size_t t = 0; t < o.size(); ++t) o[t] += i2.offset[t];
                    acc[{i2.face, o}] += static_cast<long long>(i1.sign) * i2.sign;
                }
            }
            for (const auto& [key, v] : acc)
                if (v != 0)
                    throw std::runtime_error(
                        "complex " + origin + ": boundary of boundary nonzero on " +
                        std::to_string(k) + "-cell " + std::to_string(c));
        }
    }
}

CoverComplex::CoverComplex(BaseComplex base, GroupModel group, int window_radius,
                           std::uint64_t max_cells)
    : base_(std::move(base)), group_(group), window_(group, window_radius) {
    if (group_.is_lattice() && base_.offset_dim() != group_.rank())
        throw std::invalid_argument("assemble_cover: base offsets have dimension " +
                                    std::to_string(base_.offset_dim()) +
                                    " but the lattice rank is " +
                                    std::to_string(group_.rank()));
    if (!group_.is_lattice() && base_.offset_dim() != 1)
        throw std::invalid_argument(
            "assemble_cover: cyclic groups need 1-dimensional deck offsets");
    std::uint64_t total = 0;
    for (int k = 0; k <= base_.dim(); ++k) total += total_cells(k);
    if (total > max_cells)
        throw std::runtime_error("assemble_cover: window materializes " +
                                 std::to_string(total) + " cells, above the cap of " +
                                 std::to_string(max_cells));
    radius0_ = base_.offset_radius(group_);
}

CoverPtr assemble_cover(BaseComplex base, GroupModel group, int window_radius,
                        std::uint64_t max_cells) {
    return std::make_shared<CoverComplex>(std::move(base), group, window_radius,
                                          max_cells);
}

} // namespace l2morse
