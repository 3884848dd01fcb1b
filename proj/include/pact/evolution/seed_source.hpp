#pragma once

namespace pact::evolution {

// Python source of the reference seed solver handed to the generator prompt
// and to the sandbox. Its semantics mirror inference::seed_solve.
extern const char* const kReferenceSeedSource;

}  // namespace pact::evolution
