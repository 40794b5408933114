#pragma once

// Line-oriented trace files. Records are separated by blank lines; each
// record holds one observation:
//
//   S: at(ball1,rooma)     true atom of the before-state (one per line)
//   U: free(left)          unknown atom of the before-state
//   A: (pick ball1 rooma left)   optional reference action
//   S': carry(ball1,left)  true atom of the after-state
//   U': at(ball1,rooma)    unknown atom of the after-state
//
// A bare "S:"/"S':" marker denotes an empty section; every record must
// contain an after-section. '#' lines are comments.

#include <iosfwd>
#include <string>

#include "oaru/pddl.hpp"

namespace oaru {

pddl::Trace read_trace(std::istream& in);
pddl::Trace read_trace_file(const std::string& path);

void write_trace(const pddl::Trace& trace, std::ostream& out);
void write_trace_file(const pddl::Trace& trace, const std::string& path);

}  // namespace oaru
