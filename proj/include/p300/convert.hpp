#pragma once

#include <string>

#include "p300/container.hpp"

namespace p300 {

// Both converters consume a documented intermediate text export (see
// docs/FORMATS.md) rather than the native binary formats:
//
//   epfl_export 1              bci2003_export 1
//   rate <hz>                  rate <hz>
//   channels <n> <labels...>   channels <n> <labels...>
//   samples <n>                samples <n>
//   event onset=<s> stimulus_class=<0..5> is_target=<0|1> run=<r> trial=<t>
//                              event onset=<s> stimulus_code=<0..11>
//                                    is_target=<0|1> run=<r> trial=<t>
//   data                       data
//   <one line of <samples> values per channel>
//
// Speller codes 0-5 are columns, 6-11 are rows. When both mastoids (M1, M2)
// are present the signals are re-referenced to their mean and the mastoid
// rows dropped; otherwise that step is skipped with a notice on stderr.
enum class ExternalKind { kEpflMatExport, kBci2003AsciiExport };

ExternalKind external_kind_from_name(const std::string& name);

// `alias_path` optionally names a text file of `FROM TO` label pairs applied
// to channel names before anything else.
EpochSet convert_external(const std::string& path, ExternalKind kind,
                          const std::string& alias_path = "");

}  // namespace p300
