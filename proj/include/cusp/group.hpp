#pragma once

// Finitely generated Fuchsian groups: presentations, word-metric balls,
// word and relative lengths, nearest orbit points and projected paths.

#include "cusp/hyperbolic.hpp"
#include "cusp/modular.hpp"

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace cusp::group {

using hyp::Complex;
using hyp::Mobius;
using modular::ExcursionRecord;
using modular::ZMatrix;

/// Raised when an enumeration would exceed its memory budget.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Canonical element key. Integral presentations store exact entries;
/// floating presentations store entries quantized to 1e-9.
struct Key {
    std::int64_t a = 0, b = 0, c = 0, d = 0;
    auto operator<=>(const Key&) const = default;
};

struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept;
};

struct Generator {
    std::string name;
    Mobius m;
    Key key;
    bool parabolic = false;
    int inverse = -1;  // index of the inverse generator (may be itself)
    int subgroup = -1; // parabolic subgroup id, shared by g and g^-1
};

class Presentation {
public:
    /// PSL(2,Z) with generators S, T, T^-1 (T parabolic) and basepoint 0.5 + 0.7i.
    static Presentation modular();
    /// Parses the plain-text presentation format (see docs/formats.md).
    /// Throws std::invalid_argument with the offending line number.
    static Presentation parse(std::istream& in);
    static Presentation load(const std::string& path);

    const std::vector<Generator>& generators() const { return gens_; }
    Complex basepoint() const { return basepoint_; }
    bool integral() const { return integral_; }
    bool is_modular() const { return modular_; }
    int subgroup_count() const { return subgroups_; }

    Key key(const Mobius& m) const;
    /// Exact key of an integer matrix; nullopt when an entry exceeds 64 bits.
    std::optional<Key> key(const ZMatrix& m) const;

private:
    void finish();

    std::vector<Generator> gens_;
    Complex basepoint_{0.5, 0.7};
    bool integral_ = true;
    bool modular_ = false;
    int subgroups_ = 0;
};

Mobius to_mobius(const Key& k);
ZMatrix to_zmatrix(const Key& k);

struct BallElement {
    Key key;
    Mobius m;
    int length = 0;
    std::int32_t parent = -1;    // index of the element one letter shorter
    std::int32_t generator = -1; // last letter: element = parent * generator
};

/// Breadth-first enumeration of all elements of word length <= radius.
class MetricBall {
public:
    MetricBall(const Presentation& p, int radius, std::size_t budget = 20'000'000);

    const Presentation& presentation() const { return pres_; }
    int radius() const { return radius_; }
    std::size_t size() const { return elems_.size(); }
    const BallElement& operator[](std::size_t i) const { return elems_[i]; }
    const std::vector<BallElement>& elements() const { return elems_; }

    std::optional<std::size_t> find(const Key& k) const;
    std::optional<int> length(const Key& k) const;
    /// Elements of length exactly r.
    std::span<const BallElement> sphere(int r) const;
    std::vector<std::size_t> sphere_sizes() const;
    std::string word(std::size_t index) const;

private:
    Presentation pres_;
    int radius_;
    std::vector<BallElement> elems_;
    std::vector<std::size_t> offsets_; // sphere r occupies [offsets_[r], offsets_[r+1])
    std::unordered_map<Key, std::uint32_t, KeyHash> index_;
};

MetricBall ball_enumerate(const Presentation& p, int radius, std::size_t budget = 20'000'000);

/// Word length with the ball as cache. Lengths up to twice the ball radius are
/// exact by meet-in-the-middle; beyond min(cap, 2R) the answer is nullopt.
class WordMetric {
public:
    explicit WordMetric(const MetricBall& ball) : ball_(&ball) {}

    int max_exact() const { return 2 * ball_->radius(); }
    std::optional<int> length(const Key& g, int cap) const;
    std::optional<int> length(const Mobius& g, int cap) const;
    std::optional<int> length(const ZMatrix& g, int cap) const;
    const MetricBall& ball() const { return *ball_; }

private:
    std::optional<int> meet_in_middle(const Mobius& g, const std::optional<Key>& exact, int cap) const;
    const MetricBall* ball_;
};

struct RelLength {
    std::optional<long> value;          // nullopt: exceeds the radius cap
    bool possibly_overestimated = false; // a larger power cap might lower the value
    long k_max_used = 0;
};

/// Relative length in PSL(2,Z) for the generating set {S} plus all powers T^k,
/// |k| <= k_max, each costing 1 (a larger power costs ceil(|k|/k_max)).
/// Minimizes over geodesic paths in the Farey graph from infinity to g(infinity);
/// the candidate vertices are the convergents and intermediate fractions of g(infinity).
/// Doubles k_max and retries while the optimum needs a larger power.
RelLength modular_rel_length(const ZMatrix& g, long k_max = 1L << 16, bool full_ladder = false);

/// Relative-metric ball by breadth-first search over the enlarged generating
/// set (generators plus parabolic powers |k| <= k_cap). Elements with an entry
/// above entry_bound (integral presentations) or displacement above
/// displacement_bound are pruned, so lengths are upper bounds that are exact
/// whenever some optimal path stays inside the bounds.
class RelativeBall {
public:
    RelativeBall(const Presentation& p, int radius, long k_cap, double entry_bound,
                 double displacement_bound = 1e300, std::size_t budget = 20'000'000);
    std::optional<int> length(const Key& k) const;
    std::size_t size() const { return lengths_.size(); }

private:
    std::unordered_map<Key, int, KeyHash> lengths_;
};

/// Relative length: Farey fast path for PSL(2,Z), otherwise a relative BFS
/// with power cap k_max, compared against 2 k_max to set the flag.
RelLength rel_length(const Presentation& p, const ZMatrix& g, int radius_cap, long k_max = 1L << 16);

struct LatticePoint {
    ZMatrix element;       // left as the identity for non-integral presentations
    double distance = 0.0; // from the query point to element * basepoint
    int length = -1;       // word length when found by a ball scan, else -1
};

/// Exhaustive scan over ball elements of length <= search_radius. Ties are
/// broken by canonical key order. The result is the minimizer over the ball
/// only. Throws ResourceError("search radius exhausted") when the minimizer
/// sits on the outer sphere, the usual sign that the ball is too small.
LatticePoint nearest_lattice_point(const MetricBall& ball, Complex x, int search_radius);

/// PSL(2,Z) fast path: reduction to the standard fundamental domain followed by
/// a scan of the orbit points near that domain.
class ModularLattice {
public:
    explicit ModularLattice(const MetricBall& ball);
    LatticePoint nearest(Complex x) const;
    std::size_t local_size() const { return local_.size(); }

private:
    std::vector<std::pair<Key, Complex>> local_;
    Complex basepoint_;
};

struct NamedHoroball {
    std::string name;
    hyp::Horoball ball;
};

/// Ford circles p/q with xmin <= p/q <= xmax and q <= qmax, each shrunk by
/// rho (diameter rho/q^2), plus optionally the horoball Im >= 1/rho.
std::vector<NamedHoroball> ford_family(double xmin, double xmax, long qmax, double rho = 1.0,
                                       bool include_infinity = true);

/// Length of the path that follows [x, y] outside the horoballs and replaces
/// each inside portion by the horocyclic arc between entry and exit.
/// Requires x and y outside every horoball.
double projected_path_length(Complex x, Complex y, const std::vector<NamedHoroball>& family);

/// Number of horoballs of the family crossed by the segment [x, y].
std::size_t crossed_count(Complex x, Complex y, const std::vector<NamedHoroball>& family);

/// Time-ordered excursions of g through the family meeting [0, T]. A ray that
/// ends at a horoball base yields a final record flagged open.
std::vector<ExcursionRecord> excursion_trace(const hyp::Geodesic& g,
                                             const std::vector<NamedHoroball>& family, double T);

} // namespace cusp::group
