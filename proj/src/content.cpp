#include "presim/content.hpp"

namespace presim {

const char* to_string(ReplicaState s) {
  switch (s) {
    case ReplicaState::intact: return "intact";
    case ReplicaState::silently_corrupt: return "silently_corrupt";
    case ReplicaState::lost: return "lost";
    case ReplicaState::forged: return "forged";
  }
  return "?";
}

const char* to_string(Grade g) {
  return g == Grade::consumer ? "consumer" : "enterprise";
}

}  // namespace presim
