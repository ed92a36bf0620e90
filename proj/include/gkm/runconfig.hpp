#pragma once

#include "gkm/pipeline.hpp"
#include "gkm/sheaf.hpp"

#include <iosfwd>
#include <string>

namespace gkm {

/// Parsed command-line configuration; validated against the registry before
/// dispatch.  Exit codes: 0 success, 1 computation failure or verification
/// mismatch, 2 bad arguments or malformed input files.
struct RunConfig {
  std::string command;         // compute | verify | sheaf
  std::string group;           // registry key or root-datum JSON path
  int g = 1;
  std::string c = "regular";
  std::string character;       // "" = all orbit representatives
  int D = -1;
  bool weyl = false;
  int workers = 0;             // 0 = GKM_WORKERS env or hardware default
  std::string format = "json"; // json | text
  std::string output;          // "" = stdout
  std::string path;            // golden table (verify) or descriptor (sheaf)
  std::string tier = "mandatory"; // verify: mandatory | extended
};

int cmd_compute(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_sheaf(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Dispatches on cfg.command; returns the exit code.
int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// JSON string (2-space indent, trailing newline) of a computed table row.
std::string table_row_to_json(const TableRow& row);

/// Aligned-text rendering of a table row.
std::string table_row_to_text(const TableRow& row);

/// Loads a monodromy or BM sheaf descriptor ("kind" field selects).  Throws
/// std::runtime_error with a JSON-pointer path on schema violations.
SheafModel load_sheaf_descriptor(const std::string& path, std::string* kind);

/// Custom hypergraph descriptor: vertices plus {weight, blocks} entries.
GkmHypergraph load_hypergraph_json(const std::string& path);

/// Custom root datum from JSON with the RootDatum fields; validated.
RootDatum load_root_datum_json(const std::string& path);

} // namespace gkm
