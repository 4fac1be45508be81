#pragma once

#include <optional>
#include <string>

#include "choreo/location.hpp"
#include "choreo/portable.hpp"
#include "choreo/rng.hpp"

namespace choreo {

/// The injected half of endpoint projection. ChoreoOp implements every
/// operator once, generically; a Projection decides which locations this
/// process plays and how bytes move between them. The endpoint projection
/// plays exactly one location over a Transport; the centralized projection
/// plays all of them in-process.
class Projection {
 public:
  virtual ~Projection() = default;

  virtual bool centralized() const noexcept = 0;
  virtual bool plays(const Location& l) const noexcept = 0;

  bool plays_any(const Census& c) const noexcept {
    for (const auto& l : c) {
      if (plays(l)) return true;
    }
    return false;
  }

  virtual Rng& rng(const Location& l) = 0;

  /// Moves `payload` from `sender` to every recipient other than the sender.
  /// `payload` is present whenever this projection plays the sender. Returns
  /// the bytes held afterwards when this projection plays a recipient.
  virtual std::optional<Bytes> transfer(const Location& sender, const Census& recipients,
                                        const std::optional<Bytes>& payload) = 0;

  /// Logs a branch decision taken by every member of `census` this
  /// projection plays.
  virtual void record_branch(const Census& census, const std::string& site, const std::string& outcome) = 0;

  virtual bool tracks_agreement() const noexcept { return false; }
  virtual void record_agreement(const std::string& /*op_id*/, const Census& /*owners*/,
                                const Bytes& /*encoding*/) {}
};

}  // namespace choreo
