#pragma once

#include <algorithm>
#include <condition_variable>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <thread>
#include <vector>

#include "skyline/bigint.hpp"
#include "skyline/wire.hpp"

namespace sky {

/// Expected skyline cardinality of n i.i.d. points in m dimensions:
/// ln(n)^(m-1). Requires n >= 2, m >= 2.
double expected_skyline(uint64_t n, uint64_t m);

/// Total computation load of splitting 2^u points into 2^v partitions
/// and hierarchically merging the per-partition skylines: the layer-0
/// term plus one term per merge layer.
double load_w(unsigned u, unsigned v, unsigned m, unsigned l);

/// Discrete derivative of the load in x = u - v with the common
/// 2^u ln^(m-1)2 factor dropped; independent of u and v. x >= 1.
double f_x(unsigned x, unsigned m, unsigned l);

struct PartitionPlan {
  uint64_t s = 1;               // initial partition count, power of two
  unsigned v = 0;               // log2(s)
  unsigned x_star = 0;          // u - v: log2 of the per-partition size
  uint64_t lazy_threshold = 1;  // 2^x_star points
};

/// Minimizes the load model over v in [1, u-1] by direct evaluation,
/// with u = ceil(log2 n); n <= 2 yields the no-partitioning plan s = 1.
PartitionPlan optimal_partitions(uint64_t n, uint64_t m, unsigned l);

/// Location of the f(x) sign change (largest x with f positive and f
/// negative beyond), clamped to [1, x_max]; 1 when f is never positive.
/// Cross-checks the direct argmin wherever that minimum is interior.
unsigned f_x_sign_change(unsigned m, unsigned l, unsigned x_max);

struct SchedulerStats {
  uint64_t partitions_computed = 0;
  uint64_t merges = 0;
  uint64_t retries = 0;
  bool termination_condition_observed = false;  // n_p==0, n_um==0, n_it==n_t-1
};

/// A skyline engine over an opaque point list. Instances must not share
/// protocol sessions; the scheduler calls them from several threads.
template <class Point>
using SkylineFn = std::function<std::vector<Point>(const std::vector<Point>&)>;

/// Divide-and-conquer driver: randomly split the input into plan.s
/// partitions, compute each on a worker pool, merge computed results
/// pairwise in completion order (or lazily, once plan.lazy_threshold
/// points accumulate) until a single result remains. A failed
/// computation is re-queued under its partition id; each result is
/// consumed at most once.
template <class Point>
std::vector<Point> run_partitioned(const SkylineFn<Point>& skyline_fn,
                                   const std::vector<Point>& data, const PartitionPlan& plan,
                                   unsigned workers, bool lazy, Rng& rng,
                                   SchedulerStats* stats = nullptr) {
  if (workers == 0) throw DomainError("need at least one worker");
  if (plan.s <= 1 || data.size() <= 1) {
    if (stats) *stats = SchedulerStats{1, 0, 0, true};
    return skyline_fn(data);
  }

  // Random partition: deal a shuffled index sequence into s slices, so
  // every point lands in exactly one partition.
  std::vector<size_t> order(data.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  const size_t s = static_cast<size_t>(plan.s);
  const size_t chunk = (data.size() + s - 1) / s;

  struct Task {
    uint64_t id;
    std::vector<Point> points;
  };
  struct Completion {
    uint64_t id;
    std::vector<Point> points;  // result, or the input when failed
    bool failed = false;
  };

  std::mutex mx;
  std::condition_variable cv_task, cv_event;
  std::deque<Task> queue;
  std::deque<Completion> events;
  std::deque<Task> unmerged;
  std::set<uint64_t> consumed;
  uint64_t next_id = 0;
  size_t n_p = 0;           // uncomputed partitions
  unsigned n_it = workers;  // idle threads
  size_t n_um = 0;          // computed-unmerged results
  bool stop = false;
  SchedulerStats st;

  for (size_t p = 0; p < s; ++p) {
    Task t{next_id++, {}};
    for (size_t i = p * chunk; i < std::min(data.size(), (p + 1) * chunk); ++i)
      t.points.push_back(data[order[i]]);
    if (t.points.empty()) continue;
    queue.push_back(std::move(t));
    ++n_p;
  }

  auto worker_loop = [&] {
    std::unique_lock lk(mx);
    for (;;) {
      cv_task.wait(lk, [&] { return stop || !queue.empty(); });
      if (stop) return;
      Task t = std::move(queue.front());
      queue.pop_front();
      --n_p;
      --n_it;
      // Alg-7 break state: nothing waiting anywhere and this thread is
      // the single busy one, computing the final partition.
      if (n_p == 0 && n_um == 0 && n_it == workers - 1 && events.empty())
        st.termination_condition_observed = true;
      lk.unlock();
      Completion c{t.id, {}, false};
      try {
        c.points = skyline_fn(t.points);
      } catch (...) {
        c.failed = true;
        c.points = std::move(t.points);  // hand the input back for re-queue
      }
      lk.lock();
      ++n_it;
      events.push_back(std::move(c));
      cv_event.notify_all();
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned i = 0; i < workers; ++i) pool.emplace_back(worker_loop);

  std::vector<Point> final_result;
  bool failed_for_good = false;
  {
    std::unique_lock lk(mx);
    constexpr int kMaxRetries = 3;
    std::map<uint64_t, int> retries;
    for (;;) {
      cv_event.wait(lk, [&] { return !events.empty(); });
      while (!events.empty()) {
        Completion c = std::move(events.front());
        events.pop_front();
        if (consumed.contains(c.id)) continue;  // stale duplicate
        if (c.failed) {
          if (++retries[c.id] > kMaxRetries) {
            failed_for_good = true;
            break;
          }
          ++st.retries;
          queue.push_back(Task{c.id, std::move(c.points)});
          ++n_p;
          cv_task.notify_one();
          continue;
        }
        consumed.insert(c.id);
        ++st.partitions_computed;
        unmerged.push_back(Task{c.id, std::move(c.points)});
        ++n_um;
      }
      if (failed_for_good) break;

      // Merge computed results into new partitions. Immediate mode pairs
      // them in completion order; lazy mode waits until enough points
      // accumulate to refill a partition of the model-optimal size.
      auto spawn = [&](std::vector<Point> pts) {
        queue.push_back(Task{next_id++, std::move(pts)});
        ++n_p;
        ++st.merges;
        cv_task.notify_one();
      };
      bool endgame = n_p == 0 && n_it == workers && events.empty();
      if (!lazy) {
        while (n_um >= 2) {
          std::vector<Point> merged = std::move(unmerged[0].points);
          merged.insert(merged.end(), unmerged[1].points.begin(), unmerged[1].points.end());
          unmerged.pop_front();
          unmerged.pop_front();
          n_um -= 2;
          spawn(std::move(merged));
        }
      } else {
        for (;;) {
          size_t total = 0, take = 0;
          while (take < unmerged.size() && !(take >= 2 && total >= plan.lazy_threshold))
            total += unmerged[take++].points.size();
          bool ready = take >= 2 && total >= plan.lazy_threshold;
          if (!ready && endgame && n_um >= 2) {  // final merge regardless of size
            take = unmerged.size();
            ready = true;
          }
          if (!ready) break;
          std::vector<Point> merged;
          for (size_t i = 0; i < take; ++i)
            merged.insert(merged.end(), unmerged[i].points.begin(), unmerged[i].points.end());
          unmerged.erase(unmerged.begin(), unmerged.begin() + static_cast<long>(take));
          n_um -= take;
          spawn(std::move(merged));
          endgame = false;
        }
      }

      if (n_p == 0 && n_it == workers && events.empty() && n_um == 1) {
        final_result = std::move(unmerged.front().points);
        break;
      }
    }
    stop = true;
    cv_task.notify_all();
  }
  for (auto& th : pool) th.join();
  if (failed_for_good) throw ProtocolError("partition computation kept failing after retries");
  if (stats) *stats = st;
  return final_result;
}

}  // namespace sky
