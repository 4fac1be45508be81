#include "choreo/sim_net.hpp"

#include <boost/context/fiber.hpp>
#include <boost/context/fixedsize_stack.hpp>

#include <variant>

namespace choreo {

namespace ctx = boost::context;

namespace {
constexpr std::size_t kStackSize = 512 * 1024;
}

class SimNet::Handle : public Transport {
 public:
  Handle(SimNet& net, std::size_t index) : net_(net), index_(index) {}

  void send(const Location& to, Bytes body) override { net_.send_from(index_, to, std::move(body)); }
  Bytes recv(const Location& from) override { return net_.recv_at(index_, from); }
  std::uint64_t tick() override { return net_.tick(); }

 private:
  SimNet& net_;
  std::size_t index_;
};

struct SimNet::Task {
  enum class State { kNotStarted, kRunnable, kBlocked, kDone };

  State state = State::kNotStarted;
  std::size_t waiting_from = 0;
  std::map<std::size_t, std::deque<Envelope>> inbox;
  std::function<void()> body;
  ctx::fiber fiber;
  ctx::fiber sink;
  TaskExit exit;
  std::optional<SimulationCancelled> pending_cancel;
};

SimNet::SimNet(Census census, std::uint64_t seed) : census_(std::move(census)), rng_(endpoint_rng(seed, "#simnet")) {
  for (std::size_t i = 0; i < census_.size(); ++i) handles_.push_back(std::make_unique<Handle>(*this, i));
}

SimNet::~SimNet() = default;

Transport& SimNet::handle(const Location& l) { return *handles_[index_of(l)]; }

std::size_t SimNet::index_of(const Location& l) const {
  auto idx = census_.index_of(l);
  if (!idx) throw Error(ErrorCode::kNotAMember, "'" + l.name() + "' is not on this simulated network");
  return *idx;
}

void SimNet::send_from(std::size_t from, const Location& to, Bytes body) {
  if (!running_) throw Error(ErrorCode::kTransportError, "simulated send outside of execute()");
  auto key = std::make_pair(from, index_of(to));
  auto seq = next_seq_[key]++;
  log_.push_back(MessageEvent{census_[from].name(), to.name(), seq, body.size(), tick(), std::nullopt});
  in_flight_[key].push_back(Envelope{census_[from].name(), seq, std::move(body), log_.size() - 1});
}

Bytes SimNet::recv_at(std::size_t at, const Location& from_location) {
  if (!running_) throw Error(ErrorCode::kTransportError, "simulated recv outside of execute()");
  auto from = index_of(from_location);
  auto& task = *tasks_[at];
  auto& queue = task.inbox[from];
  while (queue.empty()) {
    task.state = Task::State::kBlocked;
    task.waiting_from = from;
    task.sink = std::move(task.sink).resume();
    if (task.pending_cancel) throw *task.pending_cancel;
  }
  auto env = std::move(queue.front());
  queue.pop_front();
  log_[env.log_index].received_at = tick();
  return std::move(env.body);
}

void SimNet::resume(std::size_t i) {
  auto& task = *tasks_[i];
  if (task.state != Task::State::kDone) task.state = Task::State::kRunnable;
  task.fiber = std::move(task.fiber).resume();
}

void SimNet::cancel(std::size_t i, ErrorCode code, const std::string& reason) {
  auto& task = *tasks_[i];
  if (task.state == Task::State::kDone) return;
  task.pending_cancel.emplace(code, reason);
}

std::vector<SimNet::TaskExit> SimNet::execute(std::vector<std::function<void()>> bodies, std::uint64_t step_budget) {
  if (bodies.size() != census_.size()) {
    throw Error(ErrorCode::kPreconditionFailed, "execute needs one task per census member");
  }
  if (running_) throw Error(ErrorCode::kPreconditionFailed, "SimNet::execute is not reentrant");
  running_ = true;
  tasks_.clear();
  for (std::size_t i = 0; i < bodies.size(); ++i) {
    auto task = std::make_unique<Task>();
    task->body = std::move(bodies[i]);
    Task* raw = task.get();
    task->fiber = ctx::fiber(std::allocator_arg, ctx::fixedsize_stack(kStackSize), [raw](ctx::fiber&& sink) {
      raw->sink = std::move(sink);
      if (raw->pending_cancel) {
        raw->exit.cancelled = raw->pending_cancel->code();
        raw->exit.cancel_reason = raw->pending_cancel->what();
      } else {
        try {
          raw->body();
          raw->exit.completed = true;
        } catch (const ctx::detail::forced_unwind&) {
          throw;
        } catch (const SimulationCancelled& c) {
          raw->exit.cancelled = c.code();
          raw->exit.cancel_reason = c.what();
        } catch (...) {
          raw->exit.error = std::current_exception();
        }
      }
      raw->state = Task::State::kDone;
      return std::move(raw->sink);
    });
    tasks_.push_back(std::move(task));
  }

  using Choice = std::variant<std::size_t, std::pair<std::size_t, std::size_t>>;
  std::vector<Choice> choices;
  for (;;) {
    bool all_done = true;
    for (const auto& t : tasks_) all_done = all_done && t->state == Task::State::kDone;
    if (all_done) break;

    if (steps_ >= step_budget) {
      for (std::size_t i = 0; i < tasks_.size(); ++i) {
        cancel(i, ErrorCode::kStepBudgetExceeded,
               "step budget of " + std::to_string(step_budget) + " scheduler steps exhausted");
      }
      break;
    }

    choices.clear();
    for (std::size_t i = 0; i < tasks_.size(); ++i) {
      auto s = tasks_[i]->state;
      if (s == Task::State::kNotStarted || s == Task::State::kRunnable) choices.emplace_back(i);
    }
    for (const auto& [key, queue] : in_flight_) {
      if (!queue.empty()) choices.emplace_back(key);
    }

    if (choices.empty()) {
      bool someone_failed = false;
      for (const auto& t : tasks_) {
        someone_failed = someone_failed || (t->state == Task::State::kDone && !t->exit.completed);
      }
      for (std::size_t i = 0; i < tasks_.size(); ++i) {
        if (someone_failed) {
          cancel(i, ErrorCode::kPeerAborted, "stranded after a peer endpoint failed");
        } else {
          cancel(i, ErrorCode::kStepBudgetExceeded,
                 "no endpoint can make progress after " + std::to_string(steps_) + " steps (deadlock)");
        }
      }
      break;
    }

    ++steps_;
    const auto& pick = choices[uniform_below(rng_, choices.size())];
    if (const auto* task_index = std::get_if<std::size_t>(&pick)) {
      resume(*task_index);
    } else {
      auto key = std::get<std::pair<std::size_t, std::size_t>>(pick);
      auto& queue = in_flight_[key];
      auto env = std::move(queue.front());
      queue.pop_front();
      auto& receiver = *tasks_[key.second];
      receiver.inbox[key.first].push_back(std::move(env));
      if (receiver.state == Task::State::kBlocked && receiver.waiting_from == key.first) {
        receiver.state = Task::State::kRunnable;
      }
    }
  }

  // Unwind every task still suspended so that its stack is released cleanly.
  for (std::size_t i = 0; i < tasks_.size(); ++i) {
    while (tasks_[i]->state != Task::State::kDone) resume(i);
  }

  std::vector<TaskExit> exits;
  exits.reserve(tasks_.size());
  for (auto& t : tasks_) exits.push_back(std::move(t->exit));
  tasks_.clear();
  running_ = false;
  return exits;
}

std::size_t sim_message_count(const std::vector<MessageEvent>& log, const MessageFilter& filter) {
  std::size_t n = 0;
  for (const auto& m : log) {
    if (filter.sent_from && m.sent_at < *filter.sent_from) continue;
    if (filter.sent_before && m.sent_at >= *filter.sent_before) continue;
    if (filter.sender && m.sender != *filter.sender) continue;
    if (filter.receiver && m.receiver != *filter.receiver) continue;
    if (!filter.within.empty() && (!filter.within.count(m.sender) || !filter.within.count(m.receiver))) continue;
    ++n;
  }
  return n;
}

}  // namespace choreo
