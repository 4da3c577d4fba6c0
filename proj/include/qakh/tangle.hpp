/**
 * @file tangle.hpp
 * @brief Tangle words, resolution graphs, annular curve data and the cube of resolutions.
 *
 * A word is read bottom to top. Level 0 holds the bottom endpoints, level s the
 * endpoints after slice s. Annular closures join top position p to bottom
 * position p through the seam; Mobius closures join top p to bottom n+1-p.
 */
#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace qakh {

class ParseError : public std::runtime_error {
public:
    enum class Kind { MalformedToken, WidthViolation, Unclosable };
    ParseError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
    Kind kind;
};

/// Vert and Turn are frozen smoothings (identity / cap-over-cup) used for resolved words.
enum class SliceKind { Pos, Neg, Cup, Cap, Vert, Turn };

struct Slice {
    SliceKind kind;
    int pos;         // 1-indexed
    int orient = 0;  // cups only: +1 left leg up, -1 down, 0 unspecified (down unless forced)
    bool is_crossing() const { return kind == SliceKind::Pos || kind == SliceKind::Neg; }
    bool operator==(const Slice& o) const { return kind == o.kind && pos == o.pos && orient == o.orient; }
};

struct TangleWord {
    int bottom = 0;
    std::vector<Slice> slices;
    std::vector<int> bottom_orient;  // +1 = strand points up, -1 = down

    int top() const;
    /// Width at levels 0..L.
    std::vector<int> widths() const;
    int crossing_count() const;
    /// Slice index of each crossing, in crossing order.
    std::vector<int> crossing_slices() const;
    bool closable() const;
    std::string to_string() const;
    bool operator==(const TangleWord& o) const {
        return bottom == o.bottom && slices == o.slices && bottom_orient == o.bottom_orient;
    }
};

/**
 * Grammar: optional header lines "strands: <n>" and "orient: <+/- per strand>",
 * then whitespace separated tokens p<i>, n<i>, u<i>, a<i>, or "torus 2 <n>".
 * Frozen smoothings v<i> (vertical) and h<i> (turnback) are also accepted, and a
 * cup may carry a suffix u<i>+ / u<i>- fixing the orientation of its left leg.
 * Without a strands header the smallest valid width is used.
 */
TangleWord parse_word(const std::string& text, int strands = -1);

enum class Closure { None, Annular, Mobius };

/// Validates widths and orientations; throws ParseError. Words with turnback
/// slices are not oriented, so `oriented = false` skips the orientation checks.
void validate_word(const TangleWord& w, bool require_closable, bool oriented = true);
bool has_frozen_turnbacks(const TangleWord& w);
/// Closability for the given closure (Annular is validate_word(w, true)).
void validate_closure(const TangleWord& w, Closure closure);

/// Orientation (+1 up, -1 down) of the link strand through every point, per level.
/// Components reached through the closure inherit orientations from the bottom strands.
std::vector<std::vector<int>> point_orientations(const TangleWord& w, Closure closure = Closure::Annular);
/// Sign (+1/-1) of each crossing, in crossing order.
std::vector<int> crossing_signs(const TangleWord& w, Closure closure = Closure::Annular);
int writhe(const TangleWord& w);

/// Cyclic shift of the slices by k; the closure is isotopic in the annulus.
TangleWord rotate_closure(const TangleWord& w, int k);

/// Simple graph of curve pieces: every node has degree <= 2.
class CurveGraph {
public:
    struct Edge {
        int a, b;
        int seam;  // 0, or +p / -p: crosses the seam at position p going a -> b upward / downward
    };
    int add_node();
    int add_edge(int a, int b, int seam = 0);
    int size() const { return static_cast<int>(slots_.size()); }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    const Edge& edge(int e) const { return edges_[e]; }
    int degree(int v) const { return (slots_[v][0] >= 0) + (slots_[v][1] >= 0); }
    const std::array<int, 2>& slots(int v) const { return slots_[v]; }
    int other(int e, int v) const { return edges_[e].a == v ? edges_[e].b : edges_[e].a; }

    /// Component id per node; returns the count.
    int components(std::vector<int>& comp) const;

    struct Walk {
        std::vector<int> nodes;
        std::vector<int> seam;  // signed seam crossings in traversal order (+1 upward)
        std::vector<int> seam_pos;
        bool closed = false;
    };
    /// Walk the component through v (from an endpoint if it has one).
    Walk walk(int v) const;

private:
    std::vector<Edge> edges_;
    std::vector<std::array<int, 2>> slots_;
};

/// Smoothed word as a graph; node(level, pos) addresses endpoints (pos 0-indexed).
struct ResolutionGraph {
    CurveGraph g;
    std::vector<int> level_offset;
    std::vector<int> widths;
    int node(int level, int pos) const { return level_offset[level] + pos; }
    int top_level() const { return static_cast<int>(widths.size()) - 1; }
};

/**
 * Resolution of w at xi. For a Pos crossing bit 0 is the vertical smoothing and
 * bit 1 the turnback; for Neg the other way round. A site in `skip_site` is left
 * open (no edges) so callers can insert either smoothing.
 */
ResolutionGraph resolution_graph(const TangleWord& w, const std::vector<int>& xi, Closure closure,
                                 int skip_site = -1);
/// True if bit value b at crossing c gives the vertical smoothing.
bool smoothing_is_vertical(const TangleWord& w, int c, int b);

/// The four points around crossing c as node ids: bottom-left, bottom-right, top-left, top-right.
std::array<int, 4> site_nodes(const TangleWord& w, const ResolutionGraph& rg, int c);

// ---------------------------------------------------------------- annular curves

/// One closed curve of a closure, with its signed seam crossings in traversal order.
struct RawCircle {
    std::vector<int> seam_sign;
    std::vector<int> seam_pos;
    int algebraic() const;
};

struct RawCurveData {
    std::vector<RawCircle> circles;
};

struct RetractionStep {
    int circle;
    int pos_a, pos_b;  // seam positions of the retracted arc's endpoints
    bool positive;
    int q_exp;  // exponent picked up by the inverse isomorphism
};

struct TranscriptEntry {
    int raw_index;
    bool essential;
    int canonical_index;  // index among essential or trivial canonical circles
    int q_power;
};

struct Transcript {
    std::vector<RetractionStep> steps;
    std::vector<TranscriptEntry> entries;
    int total_q_power() const;
    bool is_identity() const;
};

struct TrivialCircle {
    int raw_index;
};

struct AnnularCurveConfig {
    int essential_count = 0;
    std::vector<TrivialCircle> trivial_circles;
    std::vector<int> essential_raw;  // raw index of each canonical essential circle
    Transcript transcript;
    RawCurveData canonical_raw;  // every circle meets the seam 0 or 1 times
};

RawCurveData raw_curves(const TangleWord& w, const std::vector<int>& xi);

/// Retract negative arcs first (positive ones only when forced); order picks among candidates.
AnnularCurveConfig canonicalize(const RawCurveData& raw, const std::vector<int>& order = {});
/// All distinct outcomes over every admissible retraction order (for confluence checks).
std::vector<AnnularCurveConfig> canonicalize_all_orders(const RawCurveData& raw);

AnnularCurveConfig resolve(const TangleWord& w, const std::vector<int>& xi);

// ---------------------------------------------------------------- cube

struct CubeEdge {
    unsigned from, to;  // vertex masks; bit c = crossing c
    int bit;
    int sign;
    bool merge;  // false: split
    std::vector<int> source_circles;  // raw circle ids touched in the source
    std::vector<int> target_circles;
};

struct CubeOfResolutions {
    int crossings = 0;
    std::vector<AnnularCurveConfig> vertices;  // indexed by mask
    std::vector<CubeEdge> edges;
    int n_plus = 0, n_minus = 0;
};

CubeOfResolutions build_cube(const TangleWord& w);
/// Edge sign (-1)^(number of set bits of mask below bit).
int edge_sign(unsigned mask, int bit);
std::vector<int> mask_bits(unsigned mask, int n);
/// Each square's four edge signs multiply to -1.
bool squares_anticommute(const CubeOfResolutions& cube, int* squares_checked = nullptr);

}  // namespace qakh
