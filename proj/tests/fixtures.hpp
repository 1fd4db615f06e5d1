#pragma once

#include <random>

#include "cimtune/fjsp.hpp"

namespace fixtures {

using namespace cimtune::fjsp;

inline Job job(std::initializer_list<std::vector<std::optional<int>>> ops) {
  Job j;
  for (const auto& times : ops) j.operations.emplace_back(times);
  return j;
}

/// The 3 jobs x 3 machines benchmark.
inline Instance table1(int t_max = 18) {
  return Instance(3,
                  {job({{3, 4, 5}, {4, 3, 6}, {5, 2, 4}}),
                   job({{4, 6, 5}, {3, 4, 5}, {2, 5, 3}}),
                   job({{2, 4, 3}, {5, 3, 4}, {3, 6, 2}})},
                  t_max);
}

/// The makespan-11 schedule: J1 M1@0 M2@6 M2@9, J2 M2@0 M1@6 M1@9, J3 M3@0 M3@3 M3@7.
inline Schedule makespan11(const Instance& inst) {
  Schedule s = Schedule::empty_for(inst);
  auto place = [&](int j, int h, int machine, int start) {
    s.at({j, h}) = ScheduledOp{machine, start, start + inst.operation({j, h}).time(machine)};
  };
  place(0, 0, 0, 0);
  place(0, 1, 1, 6);
  place(0, 2, 1, 9);
  place(1, 0, 1, 0);
  place(1, 1, 0, 6);
  place(1, 2, 0, 9);
  place(2, 0, 2, 0);
  place(2, 1, 2, 3);
  place(2, 2, 2, 7);
  return s;
}

/// Random instance with at most `max_jobs` jobs, `max_ops` ops per job and
/// `max_machines` machines; times in [1, max_time]; eligibility random.
inline Instance random_instance(std::mt19937_64& rng, int max_jobs, int max_ops, int max_machines, int max_time,
                                int t_max) {
  std::uniform_int_distribution<int> jobs_d(1, max_jobs), ops_d(1, max_ops), mach_d(1, max_machines),
      time_d(1, max_time);
  std::bernoulli_distribution eligible(0.6);
  const int machines = mach_d(rng);
  std::vector<Job> jobs(static_cast<std::size_t>(jobs_d(rng)));
  for (Job& j : jobs) {
    const int n_ops = ops_d(rng);
    for (int h = 0; h < n_ops; ++h) {
      std::vector<std::optional<int>> times(static_cast<std::size_t>(machines));
      bool any = false;
      for (auto& t : times) {
        if (eligible(rng)) {
          t = time_d(rng);
          any = true;
        }
      }
      if (!any) times[std::uniform_int_distribution<std::size_t>(0, times.size() - 1)(rng)] = time_d(rng);
      j.operations.emplace_back(times);
    }
  }
  return Instance(machines, std::move(jobs), t_max);
}

}  // namespace fixtures
