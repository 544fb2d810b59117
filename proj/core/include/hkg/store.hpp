#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "hkg/analytics.hpp"
#include "hkg/corpus.hpp"
#include "hkg/extraction.hpp"
#include "hkg/graph.hpp"
#include "hkg/quality.hpp"

namespace hkg {

inline constexpr int kFormatVersion = 1;

enum class ArtifactKind { kCorpus, kTuples, kHkg, kReport };

std::string_view to_string(ArtifactKind kind);
ArtifactKind parse_artifact_kind(std::string_view name);  // throws kValidation

// On disk: {"content_hash", "format_version", "kind", "payload"} in canonical
// form. The hash covers the canonical payload text only.
struct ArtifactEnvelope {
  int format_version = kFormatVersion;
  ArtifactKind kind = ArtifactKind::kHkg;
  nlohmann::json payload;
  std::string content_hash;
};

ArtifactEnvelope make_envelope(ArtifactKind kind, nlohmann::json payload);

// Atomic write (temp file + rename). Returns the content hash.
std::string save_envelope(const ArtifactEnvelope& envelope, const std::filesystem::path& path);

// Throws kIncompatibleVersion for another format version and kCorruption
// when the file does not parse or the hash does not match the payload.
ArtifactEnvelope load_envelope(const std::filesystem::path& path);

using Artifact = std::variant<Corpus, TupleSet, Hkg, QualityReport>;

ArtifactKind kind_of(const Artifact& artifact);
ArtifactEnvelope to_envelope(const Artifact& artifact);
Artifact from_envelope(const ArtifactEnvelope& envelope);

std::string save(const Artifact& artifact, const std::filesystem::path& path);
Artifact load(const std::filesystem::path& path);

// Loads and checks the kind; throws kValidation on a mismatch.
Corpus load_corpus_artifact(const std::filesystem::path& path);
TupleSet load_tuples_artifact(const std::filesystem::path& path);
Hkg load_hkg_artifact(const std::filesystem::path& path);
QualityReport load_report_artifact(const std::filesystem::path& path);

// One event per line, keys in the order session, t_ms, kind, payload.
std::string event_line(const InteractionEvent& event);
InteractionEvent parse_event_line(std::string_view line);

// Reads a JSON Lines event log. An unparsable final line (a writer that died
// mid-append) is dropped with a warning; damage elsewhere is kCorruption.
std::vector<InteractionEvent> read_events(const std::filesystem::path& path,
                                          Warnings* warnings = nullptr);

// Single-writer append-only log that enforces non-decreasing t_ms per
// session. Opening trims a truncated trailing line left by a crash.
class EventLog {
 public:
  explicit EventLog(std::filesystem::path path, Warnings* warnings = nullptr);

  // Flushed and fsync'd before returning. Throws kRejected when t_ms goes
  // backwards within the event's session.
  void append(const InteractionEvent& event);

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::map<std::string, std::int64_t> last_t_;
};

void append_event(const std::filesystem::path& log_path, const InteractionEvent& event);

}  // namespace hkg
