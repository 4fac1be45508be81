#pragma once

#include <cstdint>
#include <deque>
#include <exception>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "choreo/error.hpp"
#include "choreo/rng.hpp"
#include "choreo/transport.hpp"

namespace choreo {

/// Thrown inside a simulated endpoint whose run is being torn down by the
/// scheduler. Not a choreo::Error so that protocol code does not swallow it.
class SimulationCancelled : public std::exception {
 public:
  SimulationCancelled(ErrorCode code, std::string reason) : code_(code), reason_(std::move(reason)) {}
  const char* what() const noexcept override { return reason_.c_str(); }
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
  std::string reason_;
};

/// Deterministic in-memory network. Endpoints run as cooperative tasks on the
/// calling thread; a task runs until it blocks in `recv`. The scheduler then
/// picks, pseudo-randomly from the seed, either a runnable task or the head of
/// some non-empty (sender, receiver) queue to deliver. Per-pair FIFO holds in
/// every schedule, while deliveries across pairs interleave freely.
class SimNet {
 public:
  struct TaskExit {
    bool completed = false;
    std::exception_ptr error;  // exception escaping the task, if any
    std::optional<ErrorCode> cancelled;
    std::string cancel_reason;
  };

  SimNet(Census census, std::uint64_t seed);
  ~SimNet();
  SimNet(const SimNet&) = delete;
  SimNet& operator=(const SimNet&) = delete;

  const Census& census() const noexcept { return census_; }
  Transport& handle(const Location& l);

  /// Runs one task per census member (in census order) to completion.
  /// `step_budget` bounds scheduler decisions; exceeding it, or reaching a
  /// state where nothing can move while no task has failed, cancels the
  /// remaining tasks with StepBudgetExceeded. Tasks stranded after another
  /// task failed are cancelled with PeerAborted.
  std::vector<TaskExit> execute(std::vector<std::function<void()>> tasks, std::uint64_t step_budget);

  const std::vector<MessageEvent>& log() const noexcept { return log_; }
  std::uint64_t steps() const noexcept { return steps_; }
  std::uint64_t now() const noexcept { return clock_; }

 private:
  class Handle;
  struct Task;
  struct Envelope {
    std::string sender;
    std::uint64_t seq;
    Bytes body;
    std::size_t log_index;
  };

  void send_from(std::size_t from, const Location& to, Bytes body);
  Bytes recv_at(std::size_t at, const Location& from);
  std::uint64_t tick() { return ++clock_; }
  std::size_t index_of(const Location& l) const;
  void resume(std::size_t i);
  void cancel(std::size_t i, ErrorCode code, const std::string& reason);

  Census census_;
  Rng rng_;
  std::vector<std::unique_ptr<Handle>> handles_;
  std::vector<std::unique_ptr<Task>> tasks_;
  // Sent but not yet delivered, keyed by (sender index, receiver index).
  std::map<std::pair<std::size_t, std::size_t>, std::deque<Envelope>> in_flight_;
  std::map<std::pair<std::size_t, std::size_t>, std::uint64_t> next_seq_;
  std::vector<MessageEvent> log_;
  std::uint64_t clock_ = 0;
  std::uint64_t steps_ = 0;
  bool running_ = false;
};

}  // namespace choreo
