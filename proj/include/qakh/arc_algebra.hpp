/**
 * @file arc_algebra.hpp
 * @brief Cup diagrams with platforms, platform closures of flat tangles, the
 * diagram modules F(T) and the arc algebras H^n.
 *
 * Platform arcs are realized on an extended line: K pads left of the termini and
 * K + weight pads right of them. A closure joins pad p at the bottom to pad p at
 * the top by a vertical strand, so it becomes an ordinary planar closure; the
 * admissibility rules are then read off from how many pad strands a curve uses.
 * Unused pads close up into pad-only circles, which are inert (always undotted).
 */
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qakh/coeff.hpp"
#include "qakh/tangle.hpp"

namespace qakh {

/// Generalized cup diagram: every terminus is paired or runs to a platform.
struct CupDiagram {
    static constexpr int kLeft = -1;
    static constexpr int kRight = -2;
    std::vector<int> match;

    int size() const { return static_cast<int>(match.size()); }
    int left_arcs() const;
    int right_arcs() const;
    int weight() const { return right_arcs() - left_arcs(); }
    /// Binary code: 1 opens an arc, 0 closes the nearest open one or goes left; open 1s go right.
    std::string code() const;
    /// Partner digits with L / R, e.g. "10" (one cup) or "LR".
    std::string notation() const;
    /// Accepts a binary code or the partner notation.
    static CupDiagram parse(const std::string& s);
    static CupDiagram from_code(const std::string& bits);
    /// Horizontal flip (swaps the platforms).
    CupDiagram reflected() const;
    auto operator<=>(const CupDiagram&) const = default;
};

/// All diagrams with n termini, ordered by code.
std::vector<CupDiagram> enumerate_cup_diagrams(int n);
std::vector<CupDiagram> enumerate_cup_diagrams(int n, int weight);

/// Crossingless tangle as a graph: boundary nodes have degree 1, all others degree 2.
struct FlatTangle {
    int m = 0, n = 0;  // bottom / top endpoints
    int nodes = 0;
    std::vector<std::array<int, 2>> edges;
    std::vector<int> bottom, top;

    static FlatTangle identity(int n);
    /// From an endpoint matching (bottom i = i, top j = m + j) plus closed loops.
    static FlatTangle from_matching(int m, int n, const std::vector<int>& match, int loops = 0);
    static FlatTangle from_resolution(const ResolutionGraph& rg);
    /// Resolution of w at xi (xi may be empty for a crossingless word).
    static FlatTangle from_word(const TangleWord& w, const std::vector<int>& xi = {});

    /// Endpoint matching over the m + n endpoints.
    std::vector<int> matching() const;
    int loop_count() const;
    /// Arcs joining two bottom endpoints.
    int bottom_turnbacks() const;
    /// Same matching and loop order, interior nodes removed.
    FlatTangle contracted() const;
    /// `this` stacked on top of `below`; maps send old node ids to new ones.
    FlatTangle compose(const FlatTangle& below, std::vector<int>* above_map = nullptr,
                       std::vector<int>* below_map = nullptr) const;
    std::string describe() const;
};

/// Graph of the closure (top-bar) T (bottom) on the extended lines.
struct PlatformClosure {
    int K = 0, m = 0, n = 0, weight = 0;
    int eb = 0, et = 0;  // extended line lengths
    std::vector<std::array<int, 2>> nbr;
    std::vector<int> tangle_node;  // tangle node -> closure node
    std::vector<int> comp;         // closure node -> component
    struct Component {
        long key = 0;  // smallest real endpoint key; loops after all endpoints
        int left_pads = 0, right_pads = 0;
        bool has_real = false;
    };
    std::vector<Component> comps;
    bool admissible = true;
    std::vector<int> free_order;  // free (pad-free) components in key order
    std::vector<int> free_rank;   // component -> position in free_order or -1

    int bottom_node(int pos) const { return pos; }  // pos on the extended line
    int top_node(int pos) const { return eb + pos; }
    int free_count() const { return static_cast<int>(free_order.size()); }
};

/// Extended matching of a diagram with K left pads and K + weight right pads.
std::vector<int> extended_matching(const CupDiagram& c, int K);
PlatformClosure build_closure(const FlatTangle& t, const CupDiagram& bottom, const CupDiagram& top, int K);

/// l + c - a of the closure, where a counts clockwise cups and caps.
int closure_degree(const FlatTangle& t, const CupDiagram& bottom, const CupDiagram& top);

/// Dotted admissible closures of a flat tangle: the module F(T) as a graded free module.
class DiagramModule {
public:
    struct Gen {
        int bottom = 0, top = 0;  // indices into bottoms() / tops()
        std::uint32_t dots = 0;   // bit t: t-th free component carries a dot
        int weight = 0;
        int degree = 0;
    };
    explicit DiagramModule(FlatTangle t);

    const FlatTangle& tangle() const { return t_; }
    int size() const { return static_cast<int>(gens_.size()); }
    const Gen& gen(int i) const { return gens_[i]; }
    const std::vector<Gen>& gens() const { return gens_; }
    /// -1 when the labels do not name a generator.
    int index(int bottom, int top, std::uint32_t dots) const;
    const std::vector<CupDiagram>& bottoms() const { return bottoms_; }
    const std::vector<CupDiagram>& tops() const { return tops_; }
    int bottom_index(const CupDiagram& c) const;
    int top_index(const CupDiagram& c) const;
    std::string name(int i) const;
    /// Generators of the given weight.
    int dimension(int weight) const;

private:
    FlatTangle t_;
    std::vector<CupDiagram> bottoms_, tops_;
    std::vector<Gen> gens_;
    std::map<std::array<long, 3>, int> lookup_;
};

/// Sparse integer combination of generators.
using GenVector = std::vector<std::pair<int, long>>;

/**
 * Glues a generator x of `upper` on top of a generator y of `lower` along their
 * common diagram and performs one surgery per arc of it. The result is expressed
 * in `target`, whose tangle is isotopic to the stack; the maps send tangle nodes
 * of upper / lower to tangle nodes of target (or -1 for nodes that vanish).
 */
GenVector stacked_product(const DiagramModule& upper, int x, const DiagramModule& lower, int y,
                          const DiagramModule& target, const std::vector<int>& upper_map,
                          const std::vector<int>& lower_map);

/**
 * Saddle on one closure. `full_from` and `full_to` are tangles on the same node
 * set (for instance two resolutions of a word) differing in the edges (p,q), (r,s)
 * of full_from, which become (p,r), (q,s). The modules may be built on contracted
 * versions of them: generators are labeled independently of interior nodes.
 */
GenVector closure_saddle(const DiagramModule& from, const FlatTangle& full_from, int x, const DiagramModule& to,
                         const FlatTangle& full_to, std::array<int, 4> pqrs);

/// Element of H^n: generator index -> coefficient.
using ArcElement = std::map<int, LaurentPoly>;

class ArcAlgebra {
public:
    explicit ArcAlgebra(int n);
    int n() const { return n_; }
    const DiagramModule& module() const { return mod_; }
    int dimension() const { return mod_.size(); }
    int dimension(int weight) const { return mod_.dimension(weight); }
    int degree(int i) const { return mod_.gen(i).degree; }
    std::string name(int i) const { return mod_.name(i); }
    /// Generator with the given bottom / top codes and dotted free components.
    int find(const std::string& bottom, const std::string& top, std::uint32_t dots = 0) const;

    const GenVector& product(int x, int y) const { return table_[x][y]; }
    ArcElement multiply(const ArcElement& x, const ArcElement& y) const;
    ArcElement basis_element(int i) const { return {{i, LaurentPoly(1)}}; }
    ArcElement unit() const;
    /// Idempotent e_c for diagram index c of module().bottoms().
    int idempotent(int c) const;
    /// Reflection automorphism on basis elements.
    int rho(int i) const;

private:
    int n_;
    DiagramModule mod_;
    std::vector<std::vector<GenVector>> table_;  // full multiplication table
};

std::string format_element(const ArcAlgebra& a, const ArcElement& x);

}  // namespace qakh
