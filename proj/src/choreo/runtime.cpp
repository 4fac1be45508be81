#include "choreo/runtime.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>

#include "choreo/sim_net.hpp"

namespace choreo {

bool RunReport::ok() const {
  if (endpoints.empty()) return false;
  return std::all_of(endpoints.begin(), endpoints.end(), [](const auto& kv) { return kv.second.ok(); });
}

std::vector<std::pair<std::string, std::string>> RunReport::branch_log(const std::string& endpoint) const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& b : branches) {
    if (b.endpoint == endpoint) out.emplace_back(b.site, b.outcome);
  }
  return out;
}

std::vector<std::string> RunReport::endpoints_with(ErrorCode code) const {
  std::vector<std::string> out;
  for (const auto& name : census) {
    auto it = endpoints.find(name);
    if (it != endpoints.end() && it->second.error == code) out.push_back(name);
  }
  return out;
}

std::string RunReport::to_text() const {
  std::vector<std::tuple<std::uint64_t, int, std::size_t>> order;
  for (std::size_t i = 0; i < messages.size(); ++i) order.emplace_back(messages[i].sent_at, 0, i);
  for (std::size_t i = 0; i < branches.size(); ++i) order.emplace_back(branches[i].at, 1, i);
  std::stable_sort(order.begin(), order.end());
  std::ostringstream os;
  for (const auto& [t, kind, i] : order) {
    if (kind == 0) {
      const auto& m = messages[i];
      os << "MSG " << m.sender << ' ' << m.receiver << ' ' << m.bytes << ' ' << m.sent_at << '\n';
    } else {
      const auto& b = branches[i];
      os << "BRANCH " << b.endpoint << ' ' << b.site << ' ' << b.outcome << '\n';
    }
  }
  return os.str();
}

std::vector<std::string> agreement_violations(const RunReport& report) {
  std::map<std::string, std::pair<std::string, Bytes>> first_seen;
  std::vector<std::string> out;
  for (const auto& rec : report.agreement) {
    auto [it, inserted] = first_seen.emplace(rec.op_id, std::make_pair(rec.owner, rec.encoding));
    if (!inserted && it->second.second != rec.encoding) {
      out.push_back("value " + rec.op_id + " differs between " + it->second.first + " and " + rec.owner);
    }
  }
  return out;
}

std::vector<std::string> branch_disagreements(const RunReport& report) {
  std::map<std::string, std::pair<std::string, std::string>> first_seen;
  std::vector<std::string> out;
  for (const auto& b : report.branches) {
    auto [it, inserted] = first_seen.emplace(b.site, std::make_pair(b.endpoint, b.outcome));
    if (!inserted && it->second.second != b.outcome) {
      out.push_back("branch " + b.site + ": " + it->second.first + " took " + it->second.second + ", " + b.endpoint +
                    " took " + b.outcome);
    }
  }
  return out;
}

EndpointProjection::EndpointProjection(Location self, Transport& transport, std::uint64_t seed)
    : self_(std::move(self)), transport_(&transport), rng_(endpoint_rng(seed, self_.name())) {}

Rng& EndpointProjection::rng(const Location& l) {
  if (l != self_) throw Error(ErrorCode::kPreconditionFailed, self_.name() + " cannot draw " + l.name() + "'s randomness");
  return rng_;
}

std::optional<Bytes> EndpointProjection::transfer(const Location& sender, const Census& recipients,
                                                  const std::optional<Bytes>& payload) {
  if (sender == self_) {
    if (!payload) throw Error(ErrorCode::kUnwrapAbsent, "sender " + self_.name() + " has nothing to send");
    for (const auto& to : recipients) {
      if (to == self_) continue;
      auto seq = sent_seq_[to.name()]++;
      messages_.push_back(MessageEvent{self_.name(), to.name(), seq, payload->size(), transport_->tick(), std::nullopt});
      transport_->send(to, *payload);
    }
    if (recipients.contains(self_)) return payload;
    return std::nullopt;
  }
  if (recipients.contains(self_)) {
    auto body = transport_->recv(sender);
    auto seq = received_seq_[sender.name()]++;
    auto t = transport_->tick();
    messages_.push_back(MessageEvent{sender.name(), self_.name(), seq, body.size(), t, t});
    return body;
  }
  return std::nullopt;
}

void EndpointProjection::record_branch(const Census& census, const std::string& site, const std::string& outcome) {
  if (census.contains(self_)) branches_.push_back(BranchEvent{self_.name(), site, outcome, transport_->tick()});
}

void EndpointProjection::record_agreement(const std::string& op_id, const Census& owners, const Bytes& encoding) {
  if (owners.contains(self_)) agreement_.push_back(AgreementRecord{op_id, self_.name(), encoding});
}

CentralizedProjection::CentralizedProjection(const Census& census, std::uint64_t seed) : seed_(seed) {
  for (const auto& l : census) rngs_.emplace(l.name(), endpoint_rng(seed, l.name()));
}

Rng& CentralizedProjection::rng(const Location& l) {
  auto it = rngs_.find(l.name());
  if (it == rngs_.end()) it = rngs_.emplace(l.name(), endpoint_rng(seed_, l.name())).first;
  return it->second;
}

std::optional<Bytes> CentralizedProjection::transfer(const Location& sender, const Census& recipients,
                                                     const std::optional<Bytes>& payload) {
  if (!payload) throw Error(ErrorCode::kUnwrapAbsent, "sender " + sender.name() + " has nothing to send");
  for (const auto& to : recipients) {
    if (to == sender) continue;
    auto seq = seq_[{sender.name(), to.name()}]++;
    auto t = ++clock_;
    messages_.push_back(MessageEvent{sender.name(), to.name(), seq, payload->size(), t, t});
  }
  return Bytes(*payload);
}

void CentralizedProjection::record_branch(const Census& census, const std::string& site, const std::string& outcome) {
  for (const auto& l : census) branches_.push_back(BranchEvent{l.name(), site, outcome, ++clock_});
}

namespace detail {

void record_error(EndpointOutcome& out, std::exception_ptr error) {
  try {
    std::rethrow_exception(error);
  } catch (const Error& e) {
    out.error = e.code();
    out.message = e.what();
  } catch (const SimulationCancelled& e) {
    out.error = e.code();
    out.message = e.what();
  } catch (const std::exception& e) {
    out.error = ErrorCode::kPreconditionFailed;
    out.message = e.what();
  }
}

RunReport run_centralized_erased(const Census& census, const ErasedBody& body, std::uint64_t seed) {
  CentralizedProjection projection(census, seed);
  RunReport report;
  report.census = census.names();
  try {
    ChoreoOp op(census, projection);
    auto view = body(op);
    for (const auto& l : census) report.endpoints[l.name()].result = view(l);
  } catch (...) {
    auto error = std::current_exception();
    for (const auto& l : census) record_error(report.endpoints[l.name()], error);
  }
  report.messages = projection.take_messages();
  report.branches = projection.take_branches();
  return report;
}

RunReport run_simulated_erased(const Census& census, const ErasedBody& body, std::uint64_t seed,
                               const SimOptions& options) {
  SimNet net(census, seed);
  std::vector<std::unique_ptr<EndpointProjection>> projections;
  std::vector<std::optional<Value>> results(census.size());
  std::vector<std::function<void()>> tasks;
  for (std::size_t i = 0; i < census.size(); ++i) {
    projections.push_back(std::make_unique<EndpointProjection>(census[i], net.handle(census[i]), seed));
    tasks.emplace_back([&, i] {
      ChoreoOp op(census, *projections[i]);
      auto view = body(op);
      results[i] = view(census[i]);
    });
  }
  auto exits = net.execute(std::move(tasks), options.step_budget_per_endpoint * census.size());

  RunReport report;
  report.census = census.names();
  report.messages = net.log();
  report.steps = net.steps();
  for (std::size_t i = 0; i < census.size(); ++i) {
    auto& out = report.endpoints[census[i].name()];
    if (exits[i].completed) {
      out.result = std::move(results[i]);
    } else if (exits[i].error) {
      record_error(out, exits[i].error);
    } else {
      out.error = exits[i].cancelled;
      out.message = exits[i].cancel_reason;
    }
    for (auto& b : projections[i]->take_branches()) report.branches.push_back(std::move(b));
    for (auto& a : projections[i]->take_agreement()) report.agreement.push_back(std::move(a));
  }
  std::stable_sort(report.branches.begin(), report.branches.end(),
                   [](const BranchEvent& a, const BranchEvent& b) { return a.at < b.at; });
  return report;
}

RunReport run_endpoint_erased(const Census& census, const ErasedBody& body, const Location& self,
                              Transport& transport, std::uint64_t seed) {
  if (!census.contains(self)) {
    throw Error(ErrorCode::kPreconditionFailed, self.name() + " is not in census " + census.to_string());
  }
  EndpointProjection projection(self, transport, seed);
  RunReport report;
  report.census = census.names();
  auto& out = report.endpoints[self.name()];
  try {
    ChoreoOp op(census, projection);
    auto view = body(op);
    out.result = view(self);
  } catch (...) {
    record_error(out, std::current_exception());
  }
  report.messages = projection.take_messages();
  report.branches = projection.take_branches();
  report.agreement = projection.take_agreement();
  return report;
}

}  // namespace detail
}  // namespace choreo
