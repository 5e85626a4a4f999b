#include "ftsynth/search.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

namespace ftsynth {

bool candidate_better(Distance d2, int t2, std::span<const GateId> s2,
                      Distance d1, int t1, std::span<const GateId> s1) {
    if (d2 < d1 - kTieEps) {
        return true;
    }
    if (d2 > d1 + kTieEps) {
        return false;
    }
    if (t2 != t1) {
        return t2 < t1;
    }
    return seq_order_less(s2, s1);
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Best {
    GateSeq seq;
    Distance dist = kInf;
    int t = 0;
    bool set = false;

    void offer(Distance d, int tc, std::span<const GateId> s) {
        if (!set || candidate_better(d, tc, s, dist, t, seq)) {
            set = true;
            dist = d;
            t = tc;
            seq.assign(s.begin(), s.end());
        }
    }
};

// Per-task accumulator. `near` keeps the distances of every candidate that
// was within 2*kTieEps of the running best at visit time, a superset of
// anything within kTieEps of the final merged best, so the merged
// optima_count is exact and independent of task boundaries.
struct TaskAccum {
    Best best;
    std::vector<double> near;
    std::size_t prune_limit = 4096;
    std::uint64_t visited = 0;
    double min_dist = kInf;

    void visit(Distance d, std::span<const GateId> s) {
        ++visited;
        min_dist = std::min(min_dist, d);
        if (best.set && d > best.dist + 2 * kTieEps) {
            return;
        }
        near.push_back(d);
        best.offer(d, t_count(s), s);
        if (near.size() > prune_limit) {
            const double cut = best.dist + 2 * kTieEps;
            std::erase_if(near, [cut](double x) { return x > cut; });
            prune_limit = std::max<std::size_t>(4096, near.size() * 2);
        }
    }
};

// Shared visit budget; workers batch their counts to keep contention low.
// The abort point is not deterministic, but a tripped budget always ends in
// SearchBudgetError, never a partial result.
struct BudgetGate {
    std::atomic<std::uint64_t>* total = nullptr;
    std::atomic<bool>* tripped = nullptr;
    std::uint64_t limit = 0;
    std::uint64_t local = 0;

    bool admit() {
        if (!total) {
            return true;
        }
        if (++local >= 1024) {
            flush();
        }
        return !tripped->load(std::memory_order_relaxed);
    }
    void flush() {
        if (!total || local == 0) {
            return;
        }
        const std::uint64_t sum =
            total->fetch_add(local, std::memory_order_relaxed) + local;
        local = 0;
        if (sum > limit) {
            tripped->store(true, std::memory_order_relaxed);
        }
    }
};

// Enumerates, in seq_order, the length-L sequences with fixed leading gate
// whose every lprime-long window is canonical, maintaining incremental
// prefix products. The product chain starts from the identity exactly like
// evaluate(), so a given sequence yields bit-identical matrices here, in
// search_exhaustive, and in evaluate().
class WindowEnum {
  public:
    WindowEnum(const CanonDb& db, int length, GateId g0)
        : db_(db),
          lp_(db.lprime()),
          len_(length),
          seq_(static_cast<std::size_t>(length), GateId{1}),
          prefix_(static_cast<std::size_t>(length), Unitary2::identity()) {
        seq_[0] = g0;
    }

    bool next() {
        if (done_) {
            return false;
        }
        if (started_ && !carry(len_ - 1)) {
            done_ = true;
            return false;
        }
        started_ = true;
        for (;;) {
            int k = scan_from_;
            int bad = -1;
            while (k <= len_ - lp_) {
                if (db_.is_canonical(std::span(seq_).subspan(
                        static_cast<std::size_t>(k), static_cast<std::size_t>(lp_)))) {
                    ++k;
                    continue;
                }
                bad = k;
                break;
            }
            if (bad < 0) {
                scan_from_ = len_ - lp_; // only the tail window moves on ++
                return true;
            }
            if (!jump(bad)) {
                done_ = true;
                return false;
            }
        }
    }

    const GateSeq& seq() const { return seq_; }

    const Unitary2& matrix() {
        for (int i = valid_; i < len_; ++i) {
            const std::size_t u = static_cast<std::size_t>(i);
            prefix_[u] = (i == 0 ? Unitary2::identity() : prefix_[u - 1]) *
                         gate_matrix(seq_[u]);
        }
        valid_ = len_;
        return prefix_[static_cast<std::size_t>(len_) - 1];
    }

  private:
    // Sequence changed at positions >= p: windows from p-lp_+1 on must be
    // rechecked and prefix products from p on recomputed.
    void touch(int p) {
        scan_from_ = std::max(0, p - lp_ + 1);
        valid_ = std::min(valid_, p);
    }

    // Odometer increment confined to positions >= 1; position 0 is the
    // shard boundary. False = shard exhausted.
    bool carry(int p) {
        while (p >= 1 && seq_[static_cast<std::size_t>(p)] == kAlphabetSize) {
            --p;
        }
        if (p < 1) {
            return false;
        }
        ++seq_[static_cast<std::size_t>(p)];
        std::fill(seq_.begin() + p + 1, seq_.end(), GateId{1});
        touch(p);
        return true;
    }

    // Replaces the non-canonical window at offset k by its canon_successor,
    // resetting everything after it; carries leftward when no successor of
    // that window prefix is left.
    bool jump(int k) {
        const auto window = std::span(seq_).subspan(static_cast<std::size_t>(k),
                                                    static_cast<std::size_t>(lp_));
        const GateSeq* succ = db_.canon_successor(window);
        if (!succ) {
            return carry(k - 1);
        }
        if (k == 0 && (*succ)[0] != seq_[0]) {
            return false; // successor leaves this shard
        }
        std::copy(succ->begin(), succ->end(), seq_.begin() + k);
        std::fill(seq_.begin() + k + lp_, seq_.end(), GateId{1});
        touch(k);
        return true;
    }

    const CanonDb& db_;
    int lp_;
    int len_;
    GateSeq seq_;
    std::vector<Unitary2> prefix_;
    int scan_from_ = 0;
    int valid_ = 0;
    bool started_ = false;
    bool done_ = false;
};

struct Task {
    int length;
    GateId g0; // 0 = whole length straight from the database
};

struct TaskResult {
    int length = 0;
    TaskAccum acc;
};

TaskResult run_task(const Unitary2& target, const Task& task, const CanonDb& db,
                    BudgetGate gate) {
    TaskResult out;
    out.length = task.length;
    if (task.g0 == kIdentityId) {
        for (const CanonEntry& e : db.entries(task.length)) {
            if (!gate.admit()) {
                break;
            }
            out.acc.visit(distance(target, evaluate(e.seq)), e.seq);
        }
    } else {
        WindowEnum en(db, task.length, task.g0);
        while (en.next()) {
            if (!gate.admit()) {
                break;
            }
            out.acc.visit(distance(target, en.matrix()), en.seq());
        }
    }
    gate.flush();
    return out;
}

struct RunOutput {
    std::vector<TaskResult> results;
    double wall_seconds = 0.0;
};

RunOutput run_all(const Unitary2& target, int lmax, const CanonDb& db,
                  const SearchOptions& opts) {
    if (lmax < 0) {
        throw std::invalid_argument("search: lmax must be >= 0");
    }
    if (lmax > db.lprime() && db.lprime() < 1) {
        throw std::invalid_argument(
            "search: database lprime must be >= 1 to search beyond it");
    }

    std::vector<Task> tasks;
    const int direct = std::min(lmax, db.lprime());
    for (int l = 0; l <= direct; ++l) {
        tasks.push_back({l, kIdentityId});
    }
    for (int l = direct + 1; l <= lmax; ++l) {
        for (GateId g0 = 1; g0 <= kAlphabetSize; ++g0) {
            tasks.push_back({l, g0});
        }
    }

    const auto t0 = std::chrono::steady_clock::now();

    std::atomic<std::uint64_t> visited_total{0};
    std::atomic<bool> tripped{false};
    const BudgetGate gate_proto{opts.max_visited ? &visited_total : nullptr,
                                &tripped, opts.max_visited, 0};

    RunOutput out;
    out.results.resize(tasks.size());

    std::size_t workers = opts.shards > 0
                              ? static_cast<std::size_t>(opts.shards)
                              : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, tasks.size());

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mu;

    auto worker = [&] {
        try {
            for (;;) {
                const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
                if (i >= tasks.size() || failed.load(std::memory_order_relaxed)) {
                    break;
                }
                out.results[i] = run_task(target, tasks[i], db, gate_proto);
            }
        } catch (...) {
            std::scoped_lock lock(error_mu);
            if (!error) {
                error = std::current_exception();
            }
            failed.store(true, std::memory_order_relaxed);
        }
    };

    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back(worker);
        }
        for (auto& th : pool) {
            th.join();
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }
    if (tripped.load()) {
        throw SearchBudgetError(opts.max_visited);
    }

    out.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

// Per-length reduction of the task grid. Task order is lengths ascending
// with leading gate ascending inside a length, so folding within a length
// and then across lengths reproduces one pass over the candidates in
// seq_order; search_optimal and search_profile share this fold exactly.
struct LengthAgg {
    Best best;
    std::uint64_t visited = 0;
    std::vector<const TaskAccum*> accs;
};

std::vector<LengthAgg> aggregate_by_length(const RunOutput& run, int lmax) {
    std::vector<LengthAgg> agg(static_cast<std::size_t>(lmax) + 1);
    for (const TaskResult& r : run.results) {
        LengthAgg& a = agg[static_cast<std::size_t>(r.length)];
        a.visited += r.acc.visited;
        if (r.acc.best.set) {
            a.best.offer(r.acc.best.dist, r.acc.best.t, r.acc.best.seq);
        }
        a.accs.push_back(&r.acc);
    }
    return agg;
}

std::uint64_t count_ties(const std::vector<LengthAgg>& agg, int upto, double best_dist) {
    std::uint64_t n = 0;
    for (int l = 0; l <= upto; ++l) {
        for (const TaskAccum* acc : agg[static_cast<std::size_t>(l)].accs) {
            for (double d : acc->near) {
                if (d <= best_dist + kTieEps) {
                    ++n;
                }
            }
        }
    }
    return n;
}

} // namespace

SearchResult search_optimal(const Unitary2& target, int lmax, const CanonDb& db,
                            const SearchOptions& opts) {
    const RunOutput run = run_all(target, lmax, db, opts);
    const auto agg = aggregate_by_length(run, lmax);
    Best global;
    SearchResult out;
    for (int l = 0; l <= lmax; ++l) {
        const LengthAgg& a = agg[static_cast<std::size_t>(l)];
        if (a.best.set) {
            global.offer(a.best.dist, a.best.t, a.best.seq);
        }
        out.sequences_visited += a.visited;
        out.sequences_skipped += std::pow(24.0, l) - static_cast<double>(a.visited);
    }
    out.best_seq = global.seq;
    out.best_dist = global.dist;
    out.t_count = global.t;
    out.optima_count = count_ties(agg, lmax, global.dist);
    out.wall_seconds = run.wall_seconds;
    return out;
}

std::vector<SearchResult> search_profile(const Unitary2& target, int lmax,
                                         const CanonDb& db, const SearchOptions& opts) {
    const RunOutput run = run_all(target, lmax, db, opts);
    const auto agg = aggregate_by_length(run, lmax);
    std::vector<SearchResult> profile(static_cast<std::size_t>(lmax) + 1);
    Best global;
    std::uint64_t visited = 0;
    double skipped = 0.0;
    for (int l = 0; l <= lmax; ++l) {
        const LengthAgg& a = agg[static_cast<std::size_t>(l)];
        if (a.best.set) {
            global.offer(a.best.dist, a.best.t, a.best.seq);
        }
        visited += a.visited;
        skipped += std::pow(24.0, l) - static_cast<double>(a.visited);
        SearchResult& slot = profile[static_cast<std::size_t>(l)];
        slot.best_seq = global.seq;
        slot.best_dist = global.dist;
        slot.t_count = global.t;
        slot.sequences_visited = visited;
        slot.sequences_skipped = skipped;
        slot.optima_count = count_ties(agg, l, global.dist);
        slot.wall_seconds = run.wall_seconds;
    }
    return profile;
}

std::vector<Distance> convergence_curve(const Unitary2& target, int lmax,
                                        const CanonDb& db, const SearchOptions& opts) {
    const RunOutput run = run_all(target, lmax, db, opts);
    std::vector<Distance> curve(static_cast<std::size_t>(lmax) + 1, kInf);
    for (const TaskResult& r : run.results) {
        auto& slot = curve[static_cast<std::size_t>(r.length)];
        slot = std::min(slot, r.acc.min_dist);
    }
    for (std::size_t l = 1; l < curve.size(); ++l) {
        curve[l] = std::min(curve[l], curve[l - 1]);
    }
    return curve;
}

SearchResult search_exhaustive(const Unitary2& target, int lmax) {
    if (lmax < 0 || lmax > 6) {
        throw std::invalid_argument("search_exhaustive: lmax must be in [0, 6]");
    }
    const auto t0 = std::chrono::steady_clock::now();
    TaskAccum acc;
    for (int len = 0; len <= lmax; ++len) {
        if (len == 0) {
            const GateSeq empty;
            acc.visit(distance(target, evaluate(empty)), empty);
            continue;
        }
        GateSeq s(static_cast<std::size_t>(len), GateId{1});
        std::vector<Unitary2> prefix(s.size(), Unitary2::identity());
        int valid = 0;
        for (;;) {
            for (int i = valid; i < len; ++i) {
                const std::size_t u = static_cast<std::size_t>(i);
                prefix[u] = (i == 0 ? Unitary2::identity() : prefix[u - 1]) *
                            gate_matrix(s[u]);
            }
            valid = len;
            acc.visit(distance(target, prefix[static_cast<std::size_t>(len) - 1]), s);
            int p = len - 1;
            while (p >= 0 && s[static_cast<std::size_t>(p)] == kAlphabetSize) {
                --p;
            }
            if (p < 0) {
                break;
            }
            ++s[static_cast<std::size_t>(p)];
            std::fill(s.begin() + p + 1, s.end(), GateId{1});
            valid = p;
        }
    }
    SearchResult out;
    out.best_seq = acc.best.seq;
    out.best_dist = acc.best.dist;
    out.t_count = acc.best.t;
    out.sequences_visited = acc.visited;
    out.sequences_skipped = 0.0;
    for (double d : acc.near) {
        if (d <= acc.best.dist + kTieEps) {
            ++out.optima_count;
        }
    }
    out.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

} // namespace ftsynth
