#pragma once

// Interpreters for choreographies: projection to one endpoint over a
// transport, a centralized in-process oracle, and a seeded simulation of all
// endpoints over SimNet.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "choreo/choreo_op.hpp"
#include "choreo/projection.hpp"
#include "choreo/transport.hpp"
#include "choreo/view.hpp"

namespace choreo {

/// A choreography: a procedure over the operator bundle plus its census.
template <class Args, class Ret>
struct Choreography {
  Census census;
  std::function<Ret(ChoreoOp&, const Args&)> body;
};

struct BranchEvent {
  std::string endpoint;
  std::string site;
  std::string outcome;
  std::uint64_t at = 0;

  friend bool operator==(const BranchEvent&, const BranchEvent&) = default;
};

/// Encoding of a multiply-owned value as materialized at one owner.
struct AgreementRecord {
  std::string op_id;
  std::string owner;
  Bytes encoding;
};

struct EndpointOutcome {
  std::optional<Value> result;
  std::optional<ErrorCode> error;
  std::string message;

  bool ok() const noexcept { return result.has_value(); }
};

struct RunReport {
  std::vector<std::string> census;
  std::map<std::string, EndpointOutcome> endpoints;
  std::vector<MessageEvent> messages;
  std::vector<BranchEvent> branches;
  std::vector<AgreementRecord> agreement;
  std::uint64_t steps = 0;

  /// Every endpoint the report covers produced a result. Endpoint runs cover
  /// only their own location.
  bool ok() const;
  std::size_t message_count() const noexcept { return messages.size(); }
  /// (site, outcome) pairs in the order the endpoint took them.
  std::vector<std::pair<std::string, std::string>> branch_log(const std::string& endpoint) const;
  /// Endpoints that raised `code`.
  std::vector<std::string> endpoints_with(ErrorCode code) const;

  /// Line-oriented text: `MSG sender receiver bytes t` and
  /// `BRANCH endpoint site outcome`, in timestamp order.
  std::string to_text() const;
};

/// Owners whose encodings of the same multiply-owned value differ, as
/// human-readable descriptions. Empty means the agreement invariant held.
std::vector<std::string> agreement_violations(const RunReport& report);

/// Sites where endpoints of the same census recorded different outcomes.
std::vector<std::string> branch_disagreements(const RunReport& report);

struct SimOptions {
  std::uint64_t step_budget_per_endpoint = 10000;
};

/// Projection onto a single endpoint, backed by a transport.
class EndpointProjection final : public Projection {
 public:
  EndpointProjection(Location self, Transport& transport, std::uint64_t seed);

  bool centralized() const noexcept override { return false; }
  bool plays(const Location& l) const noexcept override { return l == self_; }
  Rng& rng(const Location& l) override;
  std::optional<Bytes> transfer(const Location& sender, const Census& recipients,
                                const std::optional<Bytes>& payload) override;
  void record_branch(const Census& census, const std::string& site, const std::string& outcome) override;
  bool tracks_agreement() const noexcept override { return true; }
  void record_agreement(const std::string& op_id, const Census& owners, const Bytes& encoding) override;

  const Location& self() const noexcept { return self_; }
  std::vector<MessageEvent> take_messages() { return std::move(messages_); }
  std::vector<BranchEvent> take_branches() { return std::move(branches_); }
  std::vector<AgreementRecord> take_agreement() { return std::move(agreement_); }

 private:
  Location self_;
  Transport* transport_;
  Rng rng_;
  std::map<std::string, std::uint64_t> sent_seq_;
  std::map<std::string, std::uint64_t> received_seq_;
  std::vector<MessageEvent> messages_;
  std::vector<BranchEvent> branches_;
  std::vector<AgreementRecord> agreement_;
};

/// Plays every location in one process. Multicasts still encode and decode,
/// and are logged as the messages an endpoint run would send.
class CentralizedProjection final : public Projection {
 public:
  CentralizedProjection(const Census& census, std::uint64_t seed);

  bool centralized() const noexcept override { return true; }
  bool plays(const Location&) const noexcept override { return true; }
  Rng& rng(const Location& l) override;
  std::optional<Bytes> transfer(const Location& sender, const Census& recipients,
                                const std::optional<Bytes>& payload) override;
  void record_branch(const Census& census, const std::string& site, const std::string& outcome) override;

  std::vector<MessageEvent> take_messages() { return std::move(messages_); }
  std::vector<BranchEvent> take_branches() { return std::move(branches_); }

 private:
  std::uint64_t seed_;
  std::map<std::string, Rng> rngs_;
  std::map<std::pair<std::string, std::string>, std::uint64_t> seq_;
  std::vector<MessageEvent> messages_;
  std::vector<BranchEvent> branches_;
  std::uint64_t clock_ = 0;
};

namespace detail {

using ResultView = std::function<Value(const Location&)>;
using ErasedBody = std::function<ResultView(ChoreoOp&)>;

template <class Args, class Ret>
ErasedBody erase(const Choreography<Args, Ret>& c, const Args& args) {
  return [&c, &args](ChoreoOp& op) -> ResultView {
    auto result = std::make_shared<Ret>(c.body(op, args));
    return [result](const Location& at) { return view_at(*result, at); };
  };
}

RunReport run_centralized_erased(const Census& census, const ErasedBody& body, std::uint64_t seed);
RunReport run_simulated_erased(const Census& census, const ErasedBody& body, std::uint64_t seed,
                               const SimOptions& options);
RunReport run_endpoint_erased(const Census& census, const ErasedBody& body, const Location& self,
                              Transport& transport, std::uint64_t seed);
void record_error(EndpointOutcome& out, std::exception_ptr error);

}  // namespace detail

template <class Ret>
struct EndpointRun {
  Ret result;
  RunReport report;
};

/// Endpoint projection as dependency injection: run `c` with the operators
/// specialized to `self` over `transport`.
template <class Args, class Ret>
EndpointRun<Ret> project_and_run(const Choreography<Args, Ret>& c, const Location& self, Transport& transport,
                                 const Args& args, std::uint64_t seed) {
  if (!c.census.contains(self)) {
    throw Error(ErrorCode::kPreconditionFailed, self.name() + " is not in census " + c.census.to_string());
  }
  EndpointProjection projection(self, transport, seed);
  ChoreoOp op(c.census, projection);
  Ret result = c.body(op, args);
  RunReport report;
  report.census = c.census.names();
  report.endpoints[self.name()].result = view_at(result, self);
  report.messages = projection.take_messages();
  report.branches = projection.take_branches();
  report.agreement = projection.take_agreement();
  return EndpointRun<Ret>{std::move(result), std::move(report)};
}

/// Runs every endpoint's view in one process with no transport.
template <class Args, class Ret>
RunReport run_centralized(const Choreography<Args, Ret>& c, const Args& args, std::uint64_t seed) {
  return detail::run_centralized_erased(c.census, detail::erase(c, args), seed);
}

/// Runs one cooperative task per census member over a seeded SimNet.
template <class Args, class Ret>
RunReport run_simulated(const Choreography<Args, Ret>& c, const Args& args, std::uint64_t seed,
                        const SimOptions& options = {}) {
  return detail::run_simulated_erased(c.census, detail::erase(c, args), seed, options);
}

/// A choreography bound to its arguments, with the result type erased to
/// per-endpoint Values. Lets drivers treat every example uniformly.
class AnyChoreography {
 public:
  template <class Args, class Ret>
  AnyChoreography(Choreography<Args, Ret> c, Args args) {
    auto held = std::make_shared<std::pair<Choreography<Args, Ret>, Args>>(std::move(c), std::move(args));
    census_ = std::make_shared<Census>(held->first.census);
    body_ = [held](ChoreoOp& op) { return detail::erase(held->first, held->second)(op); };
  }

  const Census& census() const noexcept { return *census_; }

  RunReport centralized(std::uint64_t seed) const { return detail::run_centralized_erased(*census_, body_, seed); }
  RunReport simulated(std::uint64_t seed, const SimOptions& options = {}) const {
    return detail::run_simulated_erased(*census_, body_, seed, options);
  }
  /// Errors are recorded in the report rather than thrown.
  RunReport endpoint(const Location& self, Transport& transport, std::uint64_t seed) const {
    return detail::run_endpoint_erased(*census_, body_, self, transport, seed);
  }

 private:
  std::shared_ptr<Census> census_;
  detail::ErasedBody body_;
};

}  // namespace choreo
