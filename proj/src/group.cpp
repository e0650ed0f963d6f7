#include "cusp/group.hpp"

#include "cusp/random.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <sstream>

namespace cusp::group {

namespace {

constexpr double kQuantum = 1e9;

using i128 = __int128;

bool fits64(i128 x) {
    return x >= std::numeric_limits<std::int64_t>::min() && x <= std::numeric_limits<std::int64_t>::max();
}

Key canonical(Key k) {
    for (std::int64_t x : {k.a, k.b, k.c, k.d}) {
        if (x > 0) return k;
        if (x < 0) return Key{-k.a, -k.b, -k.c, -k.d};
    }
    return k;
}

std::optional<Key> multiply(const Key& x, const Key& y) {
    const i128 a = i128(x.a) * y.a + i128(x.b) * y.c;
    const i128 b = i128(x.a) * y.b + i128(x.b) * y.d;
    const i128 c = i128(x.c) * y.a + i128(x.d) * y.c;
    const i128 d = i128(x.c) * y.b + i128(x.d) * y.d;
    if (!fits64(a) || !fits64(b) || !fits64(c) || !fits64(d)) return std::nullopt;
    return canonical(Key{std::int64_t(a), std::int64_t(b), std::int64_t(c), std::int64_t(d)});
}

Key key_inverse(const Key& k) { return canonical(Key{k.d, -k.b, -k.c, k.a}); }

std::int64_t max_entry(const Key& k) {
    return std::max({std::llabs(k.a), std::llabs(k.b), std::llabs(k.c), std::llabs(k.d)});
}

double parse_entry(const std::string& tok, bool& integral) {
    const auto slash = tok.find('/');
    if (slash != std::string::npos) {
        const double num = std::stod(tok.substr(0, slash));
        const double den = std::stod(tok.substr(slash + 1));
        if (den == 0.0) throw std::invalid_argument("zero denominator");
        const double v = num / den;
        if (v != std::round(v)) integral = false;
        return v;
    }
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument("bad number '" + tok + "'");
    if (v != std::round(v)) integral = false;
    return v;
}

} // namespace

std::size_t KeyHash::operator()(const Key& k) const noexcept {
    std::uint64_t h = splitmix64(static_cast<std::uint64_t>(k.a));
    h = splitmix64(h ^ static_cast<std::uint64_t>(k.b));
    h = splitmix64(h ^ static_cast<std::uint64_t>(k.c));
    h = splitmix64(h ^ static_cast<std::uint64_t>(k.d));
    return static_cast<std::size_t>(h);
}

Mobius to_mobius(const Key& k) {
    return Mobius{double(k.a), double(k.b), double(k.c), double(k.d)};
}

ZMatrix to_zmatrix(const Key& k) {
    auto z = [](std::int64_t x) { return mpz_class(static_cast<long>(x)); };
    return ZMatrix{z(k.a), z(k.b), z(k.c), z(k.d)};
}

// ---------------------------------------------------------------------------
// Presentations

Presentation Presentation::modular() {
    Presentation p;
    p.gens_.push_back({"S", Mobius{0, -1, 1, 0}.canonical(), {}, false});
    p.gens_.push_back({"T", Mobius{1, 1, 0, 1}, {}, true});
    p.gens_.push_back({"t", Mobius{1, -1, 0, 1}, {}, true});
    p.basepoint_ = Complex(0.5, 0.7);
    p.integral_ = true;
    p.finish();
    return p;
}

Presentation Presentation::parse(std::istream& in) {
    Presentation p;
    bool have_basepoint = false;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::vector<std::string> tok;
        for (std::string t; ls >> t;) tok.push_back(t);
        if (tok.empty()) continue;
        try {
            if (tok[0] == "basepoint") {
                if (tok.size() != 3) throw std::invalid_argument("expected: basepoint <re> <im>");
                bool dummy = true;
                p.basepoint_ = Complex(parse_entry(tok[1], dummy), parse_entry(tok[2], dummy));
                if (p.basepoint_.imag() <= 0.0) throw std::invalid_argument("basepoint must have Im > 0");
                have_basepoint = true;
            } else if (tok[0] == "generator") {
                if (tok.size() != 6 && tok.size() != 7)
                    throw std::invalid_argument("expected: generator <name> <a> <b> <c> <d> [parabolic]");
                bool integral = true;
                const double a = parse_entry(tok[2], integral), b = parse_entry(tok[3], integral);
                const double c = parse_entry(tok[4], integral), d = parse_entry(tok[5], integral);
                if (std::abs(a * d - b * c - 1.0) > 1e-9) throw std::invalid_argument("determinant must be 1");
                bool parabolic = false;
                if (tok.size() == 7) {
                    if (tok[6] != "parabolic") throw std::invalid_argument("unknown marker '" + tok[6] + "'");
                    parabolic = true;
                }
                if (!integral) p.integral_ = false;
                p.gens_.push_back({tok[1], Mobius::from_entries(a, b, c, d), {}, parabolic});
            } else {
                throw std::invalid_argument("unknown directive '" + tok[0] + "'");
            }
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("presentation line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (p.gens_.empty()) throw std::invalid_argument("presentation has no generators");
    if (!have_basepoint) throw std::invalid_argument("presentation has no basepoint");
    p.finish();
    return p;
}

Presentation Presentation::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open presentation file " + path);
    return parse(in);
}

Key Presentation::key(const Mobius& m) const {
    const Mobius c = m.canonical();
    if (integral_) {
        Key k;
        std::int64_t* out[4] = {&k.a, &k.b, &k.c, &k.d};
        const double in[4] = {c.a, c.b, c.c, c.d};
        for (int i = 0; i < 4; ++i) {
            const double r = std::round(in[i]);
            if (std::abs(in[i] - r) > 1e-6 || std::abs(r) > 9e15)
                throw std::domain_error("matrix is not integral to working precision");
            *out[i] = static_cast<std::int64_t>(r);
        }
        return canonical(k);
    }
    return canonical(Key{std::llround(c.a * kQuantum), std::llround(c.b * kQuantum),
                         std::llround(c.c * kQuantum), std::llround(c.d * kQuantum)});
}

std::optional<Key> Presentation::key(const ZMatrix& m) const {
    const ZMatrix c = m.canonical();
    if (!c.a.fits_slong_p() || !c.b.fits_slong_p() || !c.c.fits_slong_p() || !c.d.fits_slong_p())
        return std::nullopt;
    const Key k{c.a.get_si(), c.b.get_si(), c.c.get_si(), c.d.get_si()};
    if (integral_) return k;
    return key(to_mobius(k));
}

void Presentation::finish() {
    for (auto& g : gens_) {
        g.key = key(g.m);
        if (g.parabolic && std::abs(std::abs(g.m.trace()) - 2.0) > 1e-9)
            throw std::invalid_argument("generator " + g.name + " is marked parabolic but |trace| != 2");
    }
    // Close the generating set under inverses.
    const std::size_t original = gens_.size();
    for (std::size_t i = 0; i < original; ++i) {
        const Key inv = key(inverse(gens_[i].m));
        auto it = std::find_if(gens_.begin(), gens_.end(), [&](const Generator& g) { return g.key == inv; });
        if (it == gens_.end()) {
            Generator g{gens_[i].name + "^-1", inverse(gens_[i].m), inv, gens_[i].parabolic};
            gens_.push_back(g);
        }
    }
    for (auto& g : gens_) {
        const Key inv = key(inverse(g.m));
        for (std::size_t j = 0; j < gens_.size(); ++j)
            if (gens_[j].key == inv) g.inverse = static_cast<int>(j);
    }
    subgroups_ = 0;
    for (std::size_t i = 0; i < gens_.size(); ++i) {
        if (!gens_[i].parabolic) continue;
        if (gens_[i].subgroup < 0) {
            gens_[i].subgroup = subgroups_;
            const int inv = gens_[i].inverse;
            if (!gens_[inv].parabolic) throw std::invalid_argument("inverse of a parabolic generator must be parabolic");
            gens_[inv].subgroup = subgroups_;
            ++subgroups_;
        }
    }
    // Trivial stabilizer of the basepoint among short words.
    std::vector<Mobius> frontier{Mobius::identity()};
    for (int len = 1; len <= 4; ++len) {
        std::vector<Mobius> next;
        for (const Mobius& w : frontier)
            for (const auto& g : gens_) {
                const Mobius h = compose(w, g.m);
                if (approx_equal(h, Mobius::identity(), 1e-9)) continue;
                if (hyp::distance(hyp::apply(h, basepoint_), basepoint_) < 1e-9)
                    throw std::invalid_argument("basepoint has a nontrivial stabilizer");
                next.push_back(h);
            }
        frontier = std::move(next);
    }
    // Recognize the modular presentation {S, T, T^-1}.
    std::vector<Key> keys;
    for (const auto& g : gens_) keys.push_back(g.key);
    std::sort(keys.begin(), keys.end());
    std::vector<Key> want{canonical(Key{0, -1, 1, 0}), Key{1, 1, 0, 1}, Key{1, -1, 0, 1}};
    std::sort(want.begin(), want.end());
    modular_ = integral_ && keys == want && subgroups_ == 1;
}

// ---------------------------------------------------------------------------
// Word metric ball

MetricBall::MetricBall(const Presentation& p, int radius, std::size_t budget) : pres_(p), radius_(radius) {
    if (radius < 0) throw std::invalid_argument("ball radius must be nonnegative");
    elems_.push_back({p.key(Mobius::identity()), Mobius::identity(), 0, -1, -1});
    index_.emplace(elems_[0].key, 0);
    offsets_ = {0, 1};
    const auto& gens = p.generators();
    for (int r = 1; r <= radius; ++r) {
        const std::size_t lo = offsets_[r - 1], hi = offsets_[r];
        const std::size_t last = hi - lo;
        const std::size_t before = r >= 2 ? offsets_[r - 1] - offsets_[r - 2] : 1;
        const double growth = double(last) / double(std::max<std::size_t>(before, 1));
        const double projected = double(elems_.size()) + double(last) * std::max(growth, 1.0);
        if (projected > double(budget)) {
            std::ostringstream msg;
            msg << "ball of radius " << radius << " exceeds budget of " << budget << " elements (radius " << r - 1
                << " has " << elems_.size() << ", measured sphere growth " << growth << " per step)";
            throw ResourceError(msg.str());
        }
        for (std::size_t i = lo; i < hi; ++i) {
            for (std::size_t gi = 0; gi < gens.size(); ++gi) {
                Key k;
                if (p.integral()) {
                    const auto prod = multiply(elems_[i].key, gens[gi].key);
                    if (!prod) throw ResourceError("integer overflow while enumerating the ball");
                    k = *prod;
                } else {
                    k = p.key(compose(elems_[i].m, gens[gi].m));
                }
                if (index_.contains(k)) continue;
                const Mobius m = p.integral() ? to_mobius(k) : compose(elems_[i].m, gens[gi].m);
                index_.emplace(k, static_cast<std::uint32_t>(elems_.size()));
                elems_.push_back({k, m, r, static_cast<std::int32_t>(i), static_cast<std::int32_t>(gi)});
            }
        }
        offsets_.push_back(elems_.size());
    }
}

std::optional<std::size_t> MetricBall::find(const Key& k) const {
    const auto it = index_.find(k);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::optional<int> MetricBall::length(const Key& k) const {
    const auto i = find(k);
    if (!i) return std::nullopt;
    return elems_[*i].length;
}

std::span<const BallElement> MetricBall::sphere(int r) const {
    if (r < 0 || r > radius_) return {};
    return std::span<const BallElement>(elems_.data() + offsets_[r], offsets_[r + 1] - offsets_[r]);
}

std::vector<std::size_t> MetricBall::sphere_sizes() const {
    std::vector<std::size_t> out;
    for (int r = 0; r <= radius_; ++r) out.push_back(offsets_[r + 1] - offsets_[r]);
    return out;
}

std::string MetricBall::word(std::size_t index) const {
    std::vector<std::string> letters;
    for (std::int32_t i = static_cast<std::int32_t>(index); elems_[i].parent >= 0; i = elems_[i].parent)
        letters.push_back(pres_.generators()[elems_[i].generator].name);
    if (letters.empty()) return "e";
    std::string out;
    for (auto it = letters.rbegin(); it != letters.rend(); ++it) {
        if (!out.empty()) out += ' ';
        out += *it;
    }
    return out;
}

MetricBall ball_enumerate(const Presentation& p, int radius, std::size_t budget) {
    return MetricBall(p, radius, budget);
}

// ---------------------------------------------------------------------------
// Word lengths

std::optional<int> WordMetric::meet_in_middle(const Mobius& g, const std::optional<Key>& exact, int cap) const {
    const MetricBall& ball = *ball_;
    const Presentation& p = ball.presentation();
    const int R = ball.radius();
    const Key gk = exact ? *exact : p.key(g);
    if (const auto len = ball.length(gk)) {
        if (*len <= cap) return len;
        return std::nullopt;
    }
    // A shortest word of length L > R splits as h w with |h| = L - R and |w| = R,
    // so the first sphere containing such an h determines L.
    const int limit = std::min(cap, 2 * R);
    for (int j = 1; j + R <= limit; ++j) {
        for (const BallElement& h : ball.sphere(j)) {
            std::optional<Key> rest;
            if (p.integral()) {
                rest = multiply(key_inverse(h.key), gk);
            } else {
                rest = p.key(compose(inverse(h.m), g));
            }
            if (rest && ball.find(*rest)) return j + R;
        }
    }
    return std::nullopt;
}

std::optional<int> WordMetric::length(const Key& g, int cap) const {
    const Presentation& p = ball_->presentation();
    return meet_in_middle(p.integral() ? to_mobius(g) : Mobius{double(g.a) / kQuantum, double(g.b) / kQuantum,
                                                                double(g.c) / kQuantum, double(g.d) / kQuantum},
                          g, cap);
}

std::optional<int> WordMetric::length(const Mobius& g, int cap) const {
    return meet_in_middle(g, ball_->presentation().key(g), cap);
}

std::optional<int> WordMetric::length(const ZMatrix& g, int cap) const {
    const auto k = ball_->presentation().key(g);
    if (!k) return std::nullopt; // entries beyond 64 bits are far outside any exact range
    return length(*k, cap);
}

// ---------------------------------------------------------------------------
// Relative length, PSL(2,Z) Farey path

namespace {

struct Vertex {
    mpz_class p, q; // q >= 0; infinity is (1, 0)
};

Vertex normalized(mpz_class p, mpz_class q) {
    if (q < 0 || (q == 0 && p < 0)) {
        p = -p;
        q = -q;
    }
    return {std::move(p), std::move(q)};
}

mpz_class abs_det(const Vertex& u, const Vertex& w) {
    mpz_class d = u.p * w.q - u.q * w.p;
    return abs(d);
}

struct PowerCost {
    long cost = 0;
    bool over = false;
};

PowerCost power_cost(const mpz_class& t, long k_max) {
    if (t == 0) return {0, false};
    if (t <= k_max) return {1, false};
    mpz_class c = (t + (k_max - 1)) / k_max;
    return {c.get_si(), true};
}

struct LadderResult {
    long value = 0;
    bool over = false;
};

LadderResult ladder_rel_length(const ZMatrix& g0, long k_max, bool full) {
    const ZMatrix g = g0.canonical();
    const Vertex g_inf = normalized(g.a, g.c); // g(infinity)
    const Vertex g_zero = normalized(g.b, g.d); // g(0)
    if (g_inf.q == 0) {
        const PowerCost c = power_cost(abs(g.b), k_max);
        return {c.cost, c.over};
    }
    // Candidate vertices: infinity, the two integers around the target, and the
    // intermediate fractions of every level of its continued fraction.
    const modular::ContinuedFraction cf = modular::cf_expand(modular::Rational(g_inf.p, g_inf.q), SIZE_MAX);
    std::vector<Vertex> cand;
    cand.push_back({1, 0});
    cand.push_back({cf.a0, 1});
    cand.push_back({cf.a0 + 1, 1});
    mpz_class p2 = 1, q2 = 0, p1 = cf.a0, q1 = 1; // p_{k-2}, q_{k-2} are stored in p2, q2
    for (std::uint64_t a : cf.coeffs) {
        std::vector<std::uint64_t> js;
        if (full || a <= 6) {
            for (std::uint64_t j = 0; j <= a; ++j) js.push_back(j);
        } else {
            js = {0, 1, 2, a - 2, a - 1, a};
        }
        for (std::uint64_t j : js) {
            const mpz_class mj(static_cast<unsigned long>(j));
            cand.push_back(normalized(p1 * mj + p2, q1 * mj + q2));
        }
        const mpz_class ma(static_cast<unsigned long>(a));
        mpz_class np = ma * p1 + p2, nq = ma * q1 + q2;
        p2 = p1;
        q2 = q1;
        p1 = np;
        q1 = nq;
    }
    std::sort(cand.begin(), cand.end(), [](const Vertex& x, const Vertex& y) {
        return x.q != y.q ? x.q < y.q : x.p < y.p;
    });
    cand.erase(std::unique(cand.begin(), cand.end(),
                           [](const Vertex& x, const Vertex& y) { return x.p == y.p && x.q == y.q; }),
               cand.end());
    const std::size_t n = cand.size();
    std::size_t src = n, dst = n;
    for (std::size_t i = 0; i < n; ++i) {
        if (cand[i].q == 0) src = i;
        if (cand[i].p == g_inf.p && cand[i].q == g_inf.q) dst = i;
    }
    std::vector<std::vector<std::size_t>> adj(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (abs_det(cand[i], cand[j]) == 1) {
                adj[i].push_back(j);
                adj[j].push_back(i);
            }
    auto bfs = [&](std::size_t from) {
        std::vector<int> dist(n, -1);
        std::queue<std::size_t> q;
        dist[from] = 0;
        q.push(from);
        while (!q.empty()) {
            const std::size_t u = q.front();
            q.pop();
            for (std::size_t w : adj[u])
                if (dist[w] < 0) {
                    dist[w] = dist[u] + 1;
                    q.push(w);
                }
        }
        return dist;
    };
    const std::vector<int> from_src = bfs(src), to_dst = bfs(dst);
    const int m = from_src[dst];
    if (m < 0) throw std::logic_error("Farey ladder is disconnected");

    // Dynamic programme over directed geodesic edges (prev, cur), layer by layer.
    struct State {
        long cost;
        bool over;
    };
    auto better = [](const State& x, const State& y) {
        return x.cost != y.cost ? x.cost < y.cost : (!x.over && y.over);
    };
    const Vertex virtual_zero{0, 1}; // image of 0 before the first letter
    std::map<std::pair<std::size_t, std::size_t>, State> layer; // prev index n denotes virtual_zero
    layer[{n, src}] = {0, false};
    for (int step = 0; step < m; ++step) {
        std::map<std::pair<std::size_t, std::size_t>, State> next;
        for (const auto& [edge, st] : layer) {
            const auto [prev, cur] = edge;
            const Vertex& u = prev == n ? virtual_zero : cand[prev];
            for (std::size_t w : adj[cur]) {
                if (from_src[w] != step + 1 || to_dst[w] != m - step - 1) continue;
                const PowerCost pc = power_cost(abs_det(u, cand[w]), k_max);
                const State ns{st.cost + 1 + pc.cost, st.over || pc.over};
                auto it = next.find({cur, w});
                if (it == next.end() || better(ns, it->second)) next[{cur, w}] = ns;
            }
        }
        layer = std::move(next);
    }
    State best{std::numeric_limits<long>::max(), true};
    for (const auto& [edge, st] : layer) {
        const Vertex& u = edge.first == n ? virtual_zero : cand[edge.first];
        const PowerCost pc = power_cost(abs_det(u, g_zero), k_max);
        const State fin{st.cost + pc.cost, st.over || pc.over};
        if (better(fin, best)) best = fin;
    }
    return {best.cost, best.over};
}

} // namespace

RelLength modular_rel_length(const ZMatrix& g, long k_max, bool full_ladder) {
    if (k_max < 1) throw std::invalid_argument("k_max must be positive");
    RelLength out;
    long k = k_max;
    for (;;) {
        const LadderResult r = ladder_rel_length(g, k, full_ladder);
        out.value = r.value;
        out.k_max_used = k;
        if (!r.over) {
            out.possibly_overestimated = false;
            return out;
        }
        out.possibly_overestimated = true;
        if (k > (1L << 61)) return out;
        k *= 2;
    }
}

RelativeBall::RelativeBall(const Presentation& p, int radius, long k_cap, double entry_bound,
                           double displacement_bound, std::size_t budget) {
    // Enlarged generating set: generators plus powers of parabolic generators.
    // For integer matrices h * g^k = h + k h N with h N a nonzero integer
    // matrix, so some entry is at least |k| - max|h|; larger powers are pruned.
    struct Letter {
        Key key;
        Mobius m;
        long power;
    };
    if (p.integral()) k_cap = std::min<long>(k_cap, static_cast<long>(std::min(2.0 * entry_bound + 2.0, 1e15)));
    std::vector<Letter> gens;
    std::unordered_map<Key, bool, KeyHash> seen;
    auto add = [&](const Mobius& m, long power) {
        const Key k = p.key(m);
        if (seen.emplace(k, true).second) gens.push_back({k, m, power});
    };
    for (const auto& g : p.generators()) {
        add(g.m, 1);
        if (!g.parabolic) continue;
        Mobius pw = g.m;
        for (long e = 2; e <= k_cap; ++e) {
            pw = compose(pw, g.m);
            if (p.integral()) pw = to_mobius(p.key(pw));
            add(pw, e);
        }
    }
    const Complex x0 = p.basepoint();
    std::vector<std::pair<Key, Mobius>> frontier{{p.key(Mobius::identity()), Mobius::identity()}};
    lengths_.emplace(frontier[0].first, 0);
    for (int r = 1; r <= radius && !frontier.empty(); ++r) {
        std::vector<std::pair<Key, Mobius>> next;
        for (const auto& [key, m] : frontier) {
            const double power_limit = entry_bound + double(max_entry(key));
            for (const Letter& letter : gens) {
                Key k;
                Mobius cm;
                if (p.integral()) {
                    if (double(letter.power) > power_limit) continue;
                    const auto prod = multiply(key, letter.key);
                    if (!prod || double(max_entry(*prod)) > entry_bound) continue;
                    k = *prod;
                    cm = to_mobius(k);
                } else {
                    cm = compose(m, letter.m);
                    k = p.key(cm);
                }
                if (lengths_.contains(k)) continue;
                if (displacement_bound < 1e299 && hyp::distance(x0, hyp::apply(cm, x0)) > displacement_bound) continue;
                lengths_.emplace(k, r);
                next.emplace_back(k, cm);
                if (lengths_.size() > budget) throw ResourceError("relative ball exceeds its element budget");
            }
        }
        frontier = std::move(next);
    }
}

std::optional<int> RelativeBall::length(const Key& k) const {
    const auto it = lengths_.find(k);
    if (it == lengths_.end()) return std::nullopt;
    return it->second;
}

RelLength rel_length(const Presentation& p, const ZMatrix& g, int radius_cap, long k_max) {
    if (p.is_modular()) {
        RelLength r = modular_rel_length(g, k_max);
        if (r.value && *r.value > radius_cap) r.value.reset();
        return r;
    }
    const auto k = p.key(g);
    RelLength out;
    out.k_max_used = k_max;
    if (!k) return out;
    const double entries = p.integral() ? 4.0 * double(max_entry(*k)) + 16.0 : 1e300;
    const double disp = hyp::distance(p.basepoint(), hyp::apply(g.to_mobius(), p.basepoint())) + 8.0;
    const RelativeBall base(p, radius_cap, k_max, entries, disp);
    const RelativeBall wider(p, radius_cap, 2 * k_max, entries, disp);
    const auto v1 = base.length(*k), v2 = wider.length(*k);
    if (v1) out.value = *v1;
    out.possibly_overestimated = v1 != v2;
    return out;
}

// ---------------------------------------------------------------------------
// Nearest orbit points

LatticePoint nearest_lattice_point(const MetricBall& ball, Complex x, int search_radius) {
    if (search_radius > ball.radius()) throw std::invalid_argument("search radius larger than the ball");
    const Complex x0 = ball.presentation().basepoint();
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ball.size(); ++i) {
        if (ball[i].length > search_radius) break;
        const double d = hyp::distance(x, hyp::apply(ball[i].m, x0));
        if (d < best_d - 1e-12 || (std::abs(d - best_d) <= 1e-12 && ball[i].key < ball[best].key)) {
            best = i;
            best_d = d;
        }
    }
    if (ball[best].length == search_radius && search_radius > 0)
        throw ResourceError("search radius exhausted");
    LatticePoint out;
    out.distance = best_d;
    out.length = ball[best].length;
    if (ball.presentation().integral()) out.element = to_zmatrix(ball[best].key);
    return out;
}

ModularLattice::ModularLattice(const MetricBall& ball) : basepoint_(ball.presentation().basepoint()) {
    if (!ball.presentation().is_modular()) throw std::invalid_argument("ModularLattice needs the modular presentation");
    for (const BallElement& e : ball.elements()) {
        const Complex z = hyp::apply(e.m, basepoint_);
        if (std::abs(z.real()) <= 1.5 && z.imag() >= 0.15) local_.emplace_back(e.key, z);
    }
    std::sort(local_.begin(), local_.end(), [](const auto& u, const auto& v) { return u.first < v.first; });
}

LatticePoint ModularLattice::nearest(Complex x) const {
    if (!(x.imag() > 0.0)) throw std::invalid_argument("query point must be interior");
    // z = gamma x with z in the standard fundamental domain.
    ZMatrix gamma = ZMatrix::identity();
    Complex z = x;
    for (int iter = 0; iter < 100000; ++iter) {
        const double n = std::round(z.real());
        if (n != 0.0) {
            z -= n;
            gamma = ZMatrix::T(-static_cast<long>(n)) * gamma;
        }
        if (std::norm(z) < 1.0 - 1e-15) {
            z = -1.0 / z;
            gamma = ZMatrix::S() * gamma;
        } else {
            break;
        }
    }
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < local_.size(); ++i) {
        const double d = hyp::distance(z, local_[i].second);
        if (d < best_d - 1e-12) {
            best = i;
            best_d = d;
        }
    }
    LatticePoint out;
    out.element = gamma.inverse() * to_zmatrix(local_[best].first);
    out.distance = best_d;
    return out;
}

// ---------------------------------------------------------------------------
// Horoball families

std::vector<NamedHoroball> ford_family(double xmin, double xmax, long qmax, double rho, bool include_infinity) {
    std::vector<NamedHoroball> out;
    if (include_infinity) out.push_back({"1/0", hyp::Horoball::at_infinity(1.0 / rho)});
    for (long q = 1; q <= qmax; ++q) {
        const long pmin = static_cast<long>(std::ceil(xmin * double(q)));
        const long pmax = static_cast<long>(std::floor(xmax * double(q)));
        for (long p = pmin; p <= pmax; ++p) {
            if (std::gcd(p, q) != 1) continue;
            out.push_back({std::to_string(p) + "/" + std::to_string(q),
                           hyp::Horoball::at(double(p) / double(q), rho / (double(q) * double(q)))});
        }
    }
    return out;
}

namespace {

template <class F>
void for_each_crossing(Complex x, Complex y, const std::vector<NamedHoroball>& family, F&& f) {
    const double d = hyp::distance(x, y);
    if (d == 0.0) return;
    const hyp::Geodesic g = hyp::Geodesic::through(x, y);
    for (const auto& h : family) {
        if (h.ball.depth(x) > 1e-12 || h.ball.depth(y) > 1e-12)
            throw std::invalid_argument("projected path endpoints must lie outside the horoballs");
        const hyp::EntryExit ee = hyp::entry_exit(g, h.ball);
        if (ee.kind != hyp::Passage::crossing) continue;
        if (ee.entry >= -1e-9 && ee.exit <= d + 1e-9) f(ee);
    }
}

} // namespace

double projected_path_length(Complex x, Complex y, const std::vector<NamedHoroball>& family) {
    double len = hyp::distance(x, y);
    for_each_crossing(x, y, family, [&](const hyp::EntryExit& ee) {
        const double dt = ee.exit - ee.entry;
        len += 2.0 * std::sinh(0.5 * dt) - dt;
    });
    return len;
}

std::size_t crossed_count(Complex x, Complex y, const std::vector<NamedHoroball>& family) {
    std::size_t n = 0;
    for_each_crossing(x, y, family, [&](const hyp::EntryExit&) { ++n; });
    return n;
}

std::vector<ExcursionRecord> excursion_trace(const hyp::Geodesic& g, const std::vector<NamedHoroball>& family,
                                             double T) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<ExcursionRecord> out;
    for (std::size_t i = 0; i < family.size(); ++i) {
        const hyp::EntryExit ee = hyp::entry_exit(g, family[i].ball);
        ExcursionRecord rec;
        rec.horoball = family[i].name;
        rec.index = i;
        rec.entry = ee.entry;
        rec.exit = ee.exit;
        switch (ee.kind) {
        case hyp::Passage::crossing:
            if (ee.exit <= 0.0 || ee.entry >= T) continue;
            rec.value = 2.0 * std::sinh(0.5 * (ee.exit - ee.entry));
            rec.depth = std::log(std::cosh(0.5 * (ee.exit - ee.entry)));
            break;
        case hyp::Passage::into_cusp:
            if (ee.entry >= T) continue;
            rec.value = inf;
            rec.depth = T - ee.entry;
            rec.open = true;
            break;
        case hyp::Passage::from_cusp:
            if (ee.exit <= 0.0) continue;
            rec.value = inf;
            rec.depth = ee.exit;
            rec.open = true;
            break;
        default:
            continue;
        }
        out.push_back(std::move(rec));
    }
    std::sort(out.begin(), out.end(), [](const ExcursionRecord& a, const ExcursionRecord& b) {
        return a.entry < b.entry;
    });
    return out;
}

} // namespace cusp::group
