#include "fairalloc/four.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>

namespace fairalloc {

DivergenceState divergence(const LedgerState& state, const AccountBook& book) {
    if (state.accounts.size() != book.size()) {
        throw std::invalid_argument("ledger width does not match account count");
    }
    DivergenceState out;
    const std::size_t n = book.size();
    out.d.reserve(n);
    out.e.reserve(n);
    out.account_return.reserve(n);
    const Rational fund_pnl(state.fund.cum_pnl);
    const Rational fund_np(state.fund.net_position);
    const Money total_aum = book.total_aum();
    out.fund_return = fund_pnl / total_aum;
    out.q = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const AccountState& acct = state.accounts[i];
        const Rational d_i = fund_pnl - Rational(acct.cum_pnl) / book.alpha(i);
        const Rational e_i = fund_np - Rational(acct.net_position) / book.alpha(i);
        out.q += d_i * d_i;
        out.d.push_back(d_i);
        out.e.push_back(e_i);
        out.account_return.push_back(Rational(acct.cum_pnl) / book.at(i).aum);
    }
    out.q_return = out.q / (Rational(total_aum) * total_aum);
    return out;
}

ReinforcementWeights reinforcement_weights(const LedgerState& state, const AccountBook& book,
                                           WeightFrequency frequency) {
    const DivergenceState div = divergence(state, book);
    const std::size_t n = book.size();
    ReinforcementWeights out;
    out.frequency = frequency;
    out.delta.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Rational gap = div.fund_return - div.account_return[i];
        out.delta.push_back(std::abs(gap.convert_to<double>()));
    }
    // Softmax, shifted by the max exponent for stability.
    const double peak = *std::max_element(out.delta.begin(), out.delta.end());
    double sum = 0.0;
    out.w.reserve(n);
    for (double d : out.delta) {
        const double e = std::exp(d - peak);
        out.w.push_back(e);
        sum += e;
    }
    for (double& w : out.w) {
        w /= sum;
    }
    return out;
}

int weight_bucket(WeightFrequency frequency, int day) {
    const int d = std::max(day, 1) - 1;
    switch (frequency) {
        case WeightFrequency::PerFill:
            return -1;
        case WeightFrequency::Weekly:
            return d / 5;
        case WeightFrequency::Monthly:
            return d / 21;
        case WeightFrequency::Quarterly:
            return d / 63;
    }
    throw std::logic_error("unreachable weight frequency");
}

namespace {

// Per-account bounds of the search box around the base, clamped so no part
// can trade against the fill.
struct Box {
    std::vector<Qty> lo;
    std::vector<Qty> hi;
};

Box admissible_box(const Fill& fill, const AllocationVector& base, int k) {
    const std::size_t n = base.parts.size();
    Box box;
    box.lo.resize(n);
    box.hi.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        Qty lo = base.parts[i] - k;
        Qty hi = base.parts[i] + k;
        if (fill.qty > 0) {
            lo = std::max<Qty>(lo, 0);
        } else {
            hi = std::min<Qty>(hi, 0);
        }
        box.lo[i] = lo;
        box.hi[i] = hi;
    }
    return box;
}

// Number of integer vectors in the box with the required sum, saturated at
// cap + 1 so callers can test "more than cap" without overflow.
std::uint64_t count_in_box(const Box& box, Qty sum, std::uint64_t cap) {
    const std::size_t n = box.lo.size();
    std::int64_t lo_total = 0;
    std::int64_t span_total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        lo_total += box.lo[i];
        span_total += box.hi[i] - box.lo[i];
    }
    const std::int64_t target = sum - lo_total;
    if (target < 0 || target > span_total) {
        return 0;
    }
    const std::uint64_t limit = cap + 1;
    // ways[s] = vectors over the processed prefix whose offsets sum to s.
    std::vector<std::uint64_t> ways(static_cast<std::size_t>(span_total) + 1, 0);
    ways[0] = 1;
    std::int64_t prefix_span = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::int64_t span = box.hi[i] - box.lo[i];
        prefix_span += span;
        const std::int64_t upper = std::min(prefix_span, target);
        std::vector<std::uint64_t> next(static_cast<std::size_t>(span_total) + 1, 0);
        for (std::int64_t s = 0; s <= upper; ++s) {
            std::uint64_t acc = 0;
            for (std::int64_t o = std::max<std::int64_t>(0, s - (prefix_span - span)); o <= std::min(span, s);
                 ++o) {
                acc += ways[static_cast<std::size_t>(s - o)];
                if (acc >= limit) {
                    acc = limit;
                    break;
                }
            }
            next[static_cast<std::size_t>(s)] = acc;
        }
        ways.swap(next);
    }
    return ways[static_cast<std::size_t>(target)];
}

// Visits every vector in the box with the required sum, in ascending
// lexicographic order. Residual-sum bounds over the remaining suffix prune
// dead branches; `visit` receives a scratch vector valid during the call.
template <typename Visitor>
void walk_box(const Box& box, Qty sum, Visitor&& visit) {
    const std::size_t n = box.lo.size();
    std::vector<std::int64_t> suffix_lo(n + 1, 0);
    std::vector<std::int64_t> suffix_hi(n + 1, 0);
    for (std::size_t i = n; i-- > 0;) {
        suffix_lo[i] = suffix_lo[i + 1] + box.lo[i];
        suffix_hi[i] = suffix_hi[i + 1] + box.hi[i];
    }
    std::vector<Qty> current(n);
    auto walk = [&](auto&& self, std::size_t depth, std::int64_t remaining) -> void {
        if (depth == n) {
            visit(const_cast<const std::vector<Qty>&>(current));
            return;
        }
        const std::int64_t lo = std::max<std::int64_t>(box.lo[depth], remaining - suffix_hi[depth + 1]);
        const std::int64_t hi = std::min<std::int64_t>(box.hi[depth], remaining - suffix_lo[depth + 1]);
        for (std::int64_t v = lo; v <= hi; ++v) {
            current[depth] = static_cast<Qty>(v);
            self(self, depth + 1, remaining - v);
        }
    };
    walk(walk, 0, sum);
}

void enumerate_box(const Box& box, Qty sum, std::vector<std::vector<Qty>>& out) {
    walk_box(box, sum, [&](const std::vector<Qty>& parts) { out.push_back(parts); });
}

// Single-unit transfers from the current point that keep every part on the
// fill's side of zero. Sum preservation is automatic.
std::vector<std::vector<Qty>> transfer_neighborhood(const Fill& fill, const std::vector<Qty>& current) {
    const std::size_t n = current.size();
    std::vector<std::vector<Qty>> out;
    out.push_back(current);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            if (a == b) {
                continue;
            }
            if (fill.qty > 0 && current[a] < 1) {
                continue;  // giver would go negative
            }
            if (fill.qty < 0 && current[b] > -1) {
                continue;  // receiver would go positive
            }
            std::vector<Qty> next = current;
            --next[a];
            ++next[b];
            out.push_back(std::move(next));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Everything score evaluation needs, computed once per fill so each candidate
// costs O(accounts) cheap rational work.
struct ScoreContext {
    SearchMode mode = SearchMode::Proportional;
    bool uniform = true;
    std::vector<double> w;
    std::vector<Rational> d;          // P&L gap per account after the mark
    std::vector<Rational> e0;         // position gap with the fill absorbed, before parts
    std::vector<Rational> inv_alpha;
    std::vector<Rational> targets;    // exact pro-rata split of the fill
    Rational h;                       // probe price move
};

ScoreContext make_context(Qty fill_qty, const LedgerState& state, const AccountBook& book,
                          const SearchConfig& config, const ReinforcementWeights* weights) {
    const std::size_t n = book.size();
    ScoreContext ctx;
    ctx.mode = config.mode;
    if (weights != nullptr) {
        if (weights->w.size() != n) {
            throw std::invalid_argument("weight vector does not match account count");
        }
        ctx.uniform = false;
        ctx.w = weights->w;
    }
    Money probe = config.probe;
    if (probe <= 0) {
        const Money price = state.last_price.value_or(0);
        probe = std::max<Money>(price / 100, 1);
    }
    ctx.h = probe;
    const Rational fund_pnl(state.fund.cum_pnl);
    const Rational fund_np_after(state.fund.net_position + fill_qty);
    ctx.d.reserve(n);
    ctx.e0.reserve(n);
    ctx.inv_alpha.reserve(n);
    ctx.targets.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Rational inv = Rational(1) / book.alpha(i);
        ctx.inv_alpha.push_back(inv);
        ctx.d.push_back(fund_pnl - Rational(state.accounts[i].cum_pnl) * inv);
        ctx.e0.push_back(fund_np_after - Rational(state.accounts[i].net_position) * inv);
        ctx.targets.push_back(book.alpha(i) * fill_qty);
    }
    return ctx;
}

Score score_in_context(const ScoreContext& ctx, const std::vector<Qty>& parts) {
    const std::size_t n = parts.size();
    Score s;
    s.exact = ctx.uniform;
    s.parts = parts;
    Rational pos_x = 0;
    Rational probe_x = 0;
    long double pos_f = 0.0L;
    long double probe_f = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        const Rational e_i = ctx.e0[i] - parts[i] * ctx.inv_alpha[i];
        const Rational projected = ctx.d[i] + e_i * ctx.h;
        if (ctx.uniform) {
            pos_x += e_i * e_i;
            probe_x += projected * projected;
        } else {
            const long double e_f = e_i.convert_to<long double>();
            const long double p_f = projected.convert_to<long double>();
            pos_f += ctx.w[i] * e_f * e_f;
            probe_f += ctx.w[i] * p_f * p_f;
        }
        const Rational gap = Rational(parts[i]) - ctx.targets[i];
        s.key3 += gap < 0 ? -gap : gap;
    }
    const bool proportional = ctx.mode == SearchMode::Proportional;
    if (ctx.uniform) {
        s.key1_x = proportional ? pos_x : probe_x;
        s.key2_x = proportional ? probe_x : pos_x;
        s.key1_f = s.key1_x.convert_to<long double>();
        s.key2_f = s.key2_x.convert_to<long double>();
    } else {
        s.key1_f = proportional ? pos_f : probe_f;
        s.key2_f = proportional ? probe_f : pos_f;
    }
    return s;
}

// Compare long double keys with a relative tolerance; near-ties defer to the
// next key in the cascade.
int compare_tolerant(long double a, long double b) {
    const long double diff = a - b;
    const long double scale = std::max(std::fabs(a), std::fabs(b));
    if (std::fabs(diff) <= scale * 1e-12L) {
        return 0;
    }
    return diff < 0 ? -1 : 1;
}

// Enumeration scores thousands of candidates per fill, so the inner loop runs
// on integers instead of rationals. Every per-account term has the account's
// AUM as its denominator: with A the total AUM and a_i the account's,
//   E_i = (npF' * a_i - (np_i + v_i) * A) / a_i
//   D_i + E_i*h = (DN_i + EN_i * h) / a_i        DN_i = cumF * a_i - cum_i * A
//   |v_i - target_i| = |v_i * A - a_i * qty| / A
// Only v_i varies across candidates, so the numerators are one multiply each.
// Squared sums are evaluated in long double from the exact numerators; the
// combined rounding error is below 1e-17 relative, so any gap wider than the
// band below is decided by the float sign alone and near-ties fall back to
// the exact rational comparison. The winner is identical to exact scoring.
struct FastContext {
    bool usable = false;
    bool uniform = true;
    bool proportional = true;
    std::int64_t total_aum = 0;
    std::int64_t h = 0;
    std::vector<std::int64_t> aum;
    std::vector<__int128> en0;      // npF' * a_i - np_i * A
    std::vector<__int128> dn;       // cumF * a_i - cum_i * A
    std::vector<__int128> aq;       // a_i * qty
    std::vector<double> w;
};

struct FastScore {
    long double key1 = 0.0L;
    long double key2 = 0.0L;
    __int128 key3_num = 0;  // key3 * A, exact
};

constexpr long double kFastBand = 1e-15L;

FastContext make_fast_context(Qty fill_qty, const LedgerState& state, const AccountBook& book,
                              const SearchConfig& config, const ReinforcementWeights* weights,
                              Money probe) {
    FastContext ctx;
    const std::size_t n = book.size();
    const std::int64_t total = book.total_aum();
    const Qty np_after = state.fund.net_position + fill_qty;
    // Stay far from __int128 overflow in the per-candidate products; anything
    // outside these generous ranges takes the exact path instead.
    const auto fits = [](std::int64_t value, int bits) {
        const std::int64_t bound = std::int64_t{1} << bits;
        return value > -bound && value < bound;
    };
    bool ok = fits(total, 45) && fits(probe, 35) && fits(np_after, 40) && fits(fill_qty, 40) &&
              fits(state.fund.cum_pnl, 55);
    for (std::size_t i = 0; ok && i < n; ++i)
        ok = fits(state.accounts[i].net_position, 40) && fits(state.accounts[i].cum_pnl, 55);
    if (!ok) return ctx;

    ctx.usable = true;
    ctx.uniform = weights == nullptr;
    ctx.proportional = config.mode == SearchMode::Proportional;
    ctx.total_aum = total;
    ctx.h = probe;
    ctx.aum.resize(n);
    ctx.en0.resize(n);
    ctx.dn.resize(n);
    ctx.aq.resize(n);
    if (!ctx.uniform) ctx.w = weights->w;
    for (std::size_t i = 0; i < n; ++i) {
        const std::int64_t a = book.at(i).aum;
        ctx.aum[i] = a;
        ctx.en0[i] = static_cast<__int128>(np_after) * a -
                     static_cast<__int128>(state.accounts[i].net_position) * total;
        ctx.dn[i] = static_cast<__int128>(state.fund.cum_pnl) * a -
                    static_cast<__int128>(state.accounts[i].cum_pnl) * total;
        ctx.aq[i] = static_cast<__int128>(a) * fill_qty;
    }
    return ctx;
}

FastScore fast_score(const FastContext& ctx, const std::vector<Qty>& parts) {
    FastScore s;
    long double pos = 0.0L;
    long double probe = 0.0L;
    const std::size_t n = parts.size();
    for (std::size_t i = 0; i < n; ++i) {
        const __int128 en = ctx.en0[i] - static_cast<__int128>(parts[i]) * ctx.total_aum;
        const __int128 pn = ctx.dn[i] + en * ctx.h;
        const long double a = static_cast<long double>(ctx.aum[i]);
        const long double ef = static_cast<long double>(en) / a;
        const long double pf = static_cast<long double>(pn) / a;
        if (ctx.uniform) {
            pos += ef * ef;
            probe += pf * pf;
        } else {
            pos += ctx.w[i] * ef * ef;
            probe += ctx.w[i] * pf * pf;
        }
        const __int128 gap = static_cast<__int128>(parts[i]) * ctx.total_aum - ctx.aq[i];
        s.key3_num += gap < 0 ? -gap : gap;
    }
    s.key1 = ctx.proportional ? pos : probe;
    s.key2 = ctx.proportional ? probe : pos;
    return s;
}

// -1/0/+1 like Score::compare, or -2 when the float keys sit too close to
// call and the caller must decide exactly. Only the uniform regime can return
// -2: weighted scoring is float-based by definition.
int fast_compare(const FastContext& ctx, const FastScore& a, const FastScore& b) {
    for (int key = 0; key < 2; ++key) {
        const long double x = key == 0 ? a.key1 : a.key2;
        const long double y = key == 0 ? b.key1 : b.key2;
        if (!ctx.uniform) {
            if (int c = compare_tolerant(x, y); c != 0) return c;
            continue;
        }
        const long double diff = x - y;
        const long double band = kFastBand * std::max(std::fabs(x), std::fabs(y));
        if (std::fabs(diff) > band) return diff < 0 ? -1 : 1;
        // A zero float key is exactly zero (nonnegative terms cannot cancel),
        // so two zero keys are a true tie; anything else is too close to call.
        if (!(x == 0.0L && y == 0.0L)) return -2;
    }
    if (a.key3_num != b.key3_num) return a.key3_num < b.key3_num ? -1 : 1;
    return 0;
}

}  // namespace

int Score::compare(const Score& a, const Score& b) {
    if (a.exact && b.exact) {
        if (a.key1_x != b.key1_x) {
            return a.key1_x < b.key1_x ? -1 : 1;
        }
        if (a.key2_x != b.key2_x) {
            return a.key2_x < b.key2_x ? -1 : 1;
        }
    } else {
        if (int c = compare_tolerant(a.key1_f, b.key1_f); c != 0) {
            return c;
        }
        if (int c = compare_tolerant(a.key2_f, b.key2_f); c != 0) {
            return c;
        }
    }
    if (a.key3 != b.key3) {
        return a.key3 < b.key3 ? -1 : 1;
    }
    if (a.parts != b.parts) {
        return a.parts < b.parts ? -1 : 1;
    }
    return 0;
}

std::vector<AllocationVector> candidates(const Fill& fill, const AllocationVector& base,
                                         const SearchConfig& config) {
    if (base.sum() != fill.qty) {
        throw std::invalid_argument("base allocation does not sum to the fill quantity");
    }
    const std::size_t n = base.parts.size();
    std::vector<std::vector<Qty>> raw;
    if (n > config.nmax) {
        raw = transfer_neighborhood(fill, base.parts);
    } else {
        const Box box = admissible_box(fill, base, config.k);
        if (count_in_box(box, fill.qty, config.max_enumeration) > config.max_enumeration) {
            raw = transfer_neighborhood(fill, base.parts);
        } else {
            enumerate_box(box, fill.qty, raw);
        }
    }
    std::vector<AllocationVector> out;
    out.reserve(raw.size());
    for (std::vector<Qty>& parts : raw) {
        out.push_back(AllocationVector{fill.seq, std::move(parts)});
    }
    return out;
}

Score score(const AllocationVector& candidate, const LedgerState& state, const AccountBook& book,
            const SearchConfig& config, const ReinforcementWeights* weights) {
    if (candidate.parts.size() != book.size()) {
        throw std::invalid_argument("candidate width does not match account count");
    }
    const ScoreContext ctx = make_context(candidate.sum(), state, book, config, weights);
    return score_in_context(ctx, candidate.parts);
}

namespace {

// Steepest-descent single-unit transfers on the mode's first key, evaluated
// in doubles. Starts from the base rounding, so the result never scores worse
// than it; sum and sign admissibility hold at every step by construction.
std::vector<Qty> local_search(const Fill& fill, const ScoreContext& ctx, std::vector<Qty> current,
                              const SearchConfig& config) {
    const std::size_t n = current.size();
    const double h = ctx.h.convert_to<double>();
    std::vector<double> inv_alpha(n);
    std::vector<double> d(n);
    std::vector<double> e(n);
    std::vector<double> w(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        inv_alpha[i] = ctx.inv_alpha[i].convert_to<double>();
        d[i] = ctx.d[i].convert_to<double>();
        e[i] = (ctx.e0[i] - current[i] * ctx.inv_alpha[i]).convert_to<double>();
        if (!ctx.uniform) {
            w[i] = ctx.w[i];
        }
    }
    const bool proportional = ctx.mode == SearchMode::Proportional;
    auto term = [&](std::size_t i, double e_i) {
        if (proportional) {
            return w[i] * e_i * e_i;
        }
        const double p = d[i] + e_i * h;
        return w[i] * p * p;
    };

    const std::size_t max_iter =
        config.max_local_iterations > 0 ? config.max_local_iterations : n * n;
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        double best_delta = 0.0;
        std::size_t best_a = n;
        std::size_t best_b = n;
        for (std::size_t a = 0; a < n; ++a) {
            if (fill.qty > 0 && current[a] < 1) {
                continue;
            }
            const double ea_new = e[a] + inv_alpha[a];  // giving a unit raises the gap
            const double da = term(a, ea_new) - term(a, e[a]);
            for (std::size_t b = 0; b < n; ++b) {
                if (b == a) {
                    continue;
                }
                if (fill.qty < 0 && current[b] > -1) {
                    continue;
                }
                const double eb_new = e[b] - inv_alpha[b];
                const double delta = da + term(b, eb_new) - term(b, e[b]);
                if (delta < best_delta) {
                    best_delta = delta;
                    best_a = a;
                    best_b = b;
                }
            }
        }
        if (best_a == n) {
            break;
        }
        // Require a real improvement relative to the objective's scale so
        // floating-point noise cannot make the walk cycle.
        double objective = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            objective += term(i, e[i]);
        }
        if (-best_delta <= 1e-9 * std::max(1.0, objective)) {
            break;
        }
        --current[best_a];
        ++current[best_b];
        e[best_a] += inv_alpha[best_a];
        e[best_b] -= inv_alpha[best_b];
    }
    return current;
}

}  // namespace

AllocationVector allocate_fill_four(const Fill& fill, LedgerState& state, const AccountBook& book,
                                    const SearchConfig& config, const ReinforcementWeights* weights) {
    const std::optional<Money> prev_price = state.last_price;
    state.mark(fill.price);
    state.last_price = fill.price;

    SearchConfig effective = config;
    if (effective.probe <= 0) {
        Money h = prev_price ? std::llabs(fill.price - *prev_price) : 0;
        if (h == 0) {
            h = std::max<Money>(fill.price / 100, 1);
        }
        effective.probe = h;
    }

    ResidualPolicy base_policy = ResidualPolicy::largest_account();
    const AllocationVector base = allocate_fill_proportional(fill, book, base_policy);
    const ScoreContext ctx = make_context(fill.qty, state, book, effective, weights);

    AllocationVector chosen;
    chosen.fill_seq = fill.seq;
    const std::size_t n = book.size();
    bool enumerated = false;
    if (n <= effective.nmax) {
        const Box box = admissible_box(fill, base, effective.k);
        if (count_in_box(box, fill.qty, effective.max_enumeration) <= effective.max_enumeration) {
            const FastContext fast =
                make_fast_context(fill.qty, state, book, effective, weights, effective.probe);
            std::vector<Qty> best_parts;
            if (fast.usable) {
                // Candidates walk in ascending lexicographic order, so keeping
                // the incumbent on a full tie is exactly the parts tiebreak.
                FastScore best_fast;
                std::optional<Score> best_exact;
                bool have = false;
                walk_box(box, fill.qty, [&](const std::vector<Qty>& parts) {
                    const FastScore s = fast_score(fast, parts);
                    if (!have) {
                        best_fast = s;
                        best_parts = parts;
                        have = true;
                        return;
                    }
                    const int c = fast_compare(fast, s, best_fast);
                    if (c == -2) {
                        if (!best_exact) best_exact = score_in_context(ctx, best_parts);
                        Score exact = score_in_context(ctx, parts);
                        if (Score::compare(exact, *best_exact) < 0) {
                            best_fast = s;
                            best_parts = parts;
                            best_exact = std::move(exact);
                        }
                    } else if (c < 0) {
                        best_fast = s;
                        best_parts = parts;
                        best_exact.reset();
                    }
                });
            } else {
                bool have = false;
                Score best;
                walk_box(box, fill.qty, [&](const std::vector<Qty>& parts) {
                    Score s = score_in_context(ctx, parts);
                    if (!have || Score::compare(s, best) < 0) {
                        best = std::move(s);
                        have = true;
                    }
                });
                best_parts = best.parts;
            }
            chosen.parts = std::move(best_parts);
            enumerated = true;
        }
    }
    if (!enumerated) {
        chosen.parts = local_search(fill, ctx, base.parts, effective);
    }
    validate_allocation(fill, chosen, n);
    return chosen;
}

}  // namespace fairalloc
