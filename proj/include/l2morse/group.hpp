#pragma once
#include <cstdint>
#include <string>
#include <vector>

namespace l2morse {

// A deck transformation. For a rank-d lattice the coords are the d integer
// components; for a cyclic group of order N there is a single coord, always
// stored reduced to [0, N).
struct GroupElement {
    std::vector<std::int64_t> c;

    friend bool operator==(const GroupElement&, const GroupElement&) = default;
    // Lexicographic order; this is the canonical iteration/summation order used
    // by every averaging routine, so it is part of the determinism contract.
    friend auto operator<=>(const GroupElement& a, const GroupElement& b) {
        return a.c <=> b.c;
    }
};

std::string to_string(const GroupElement& g);

// Følner set: for lattices the centered max-norm box of radius k (cardinality
// (2k+1)^d); for cyclic groups the whole group regardless of k. Membership is
// kept as an explicit lex-sorted list.
struct FolnerBox {
    int k = 0;
    std::vector<GroupElement> members; // lex-sorted
};

// Finitely generated amenable deck group: Z^d or Z/N. Generators are +/- the
// standard basis elements (for Z/N: +/-1).
class GroupModel {
public:
    enum class Kind { Lattice, Cyclic };

    static GroupModel lattice(int rank);
    static GroupModel cyclic(int order);

    Kind kind() const { return kind_; }
    int rank() const { return rank_; }   // lattice rank, or 1 for cyclic
    int order() const { return order_; } // cyclic order, 0 for lattice
    bool is_lattice() const { return kind_ == Kind::Lattice; }

    GroupElement identity() const;
    GroupElement make(std::vector<std::int64_t> coords) const; // validates/reduces
    GroupElement mul(const GroupElement& a, const GroupElement& b) const;
    GroupElement inverse(const GroupElement& g) const;
    // g * h^{-1}: the offset carrying tile h to tile g.
    GroupElement diff(const GroupElement& g, const GroupElement& h) const;

    // Word metric for the standard generators: l^1 distance on the lattice,
    // shorter-way-around distance on the cycle. Throws if the elements do not
    // have this group's coordinate shape.
    std::int64_t word_distance(const GroupElement& a, const GroupElement& b) const;
    std::int64_t word_norm(const GroupElement& g) const;
    // Max-norm of a lattice element (box radius); == word_norm for cyclic.
    std::int64_t box_norm(const GroupElement& g) const;

    // |{g : word_norm(g) <= m}|, exact count (used by the growth-bound test).
    std::uint64_t ball_size(std::int64_t m) const;

    FolnerBox folner_box(int k) const;
    std::uint64_t folner_size(int k) const;

    // All elements of the max-norm box of radius r (lattice) or the whole group
    // (cyclic), lex-sorted. This is the tile window used by assemble_cover.
    std::vector<GroupElement> box_elements(int r) const;

    bool operator==(const GroupModel&) const = default;

private:
    GroupModel(Kind k, int rank, int order) : kind_(k), rank_(rank), order_(order) {}
    void check_shape(const GroupElement& g) const;

    Kind kind_;
    int rank_;
    int order_;
};

// Finite materialized tile region with O(1) indexing. For lattices this is the
// centered box [-radius, radius]^d in row-major lex order; for cyclic groups the
// residues 0..N-1. Indexing is what makes the operator hot loops array-based.
class TileWindow {
public:
    TileWindow(GroupModel group, int radius);

    const GroupModel& group() const { return group_; }
    int radius() const { return radius_; }
    int count() const { return count_; }
    GroupElement at(int idx) const;
    // -1 when outside the window.
    int index(const GroupElement& g) const;
    bool contains(const GroupElement& g) const { return index(g) >= 0; }

    bool operator==(const TileWindow& o) const {
        return group_ == o.group_ && radius_ == o.radius_;
    }

private:
    GroupModel group_;
    int radius_;
    int count_;
};

} // namespace l2morse
