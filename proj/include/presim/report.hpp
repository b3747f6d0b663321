#pragma once

#include <string>

#include "presim/scenario.hpp"

namespace presim {

// Renders the scenario's disclosure document: the explicit threat model
// (every taxonomy threat included or explicitly excluded, with its handling),
// the replica lifecycle description, and the organizational sections that lie
// outside what a simulator can answer. Always emits exactly seven sections.
std::string disclosure_report(const Scenario& sc);

}  // namespace presim
