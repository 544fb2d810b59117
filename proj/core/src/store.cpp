#include "hkg/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "hkg/canonical_json.hpp"
#include "hkg/error.hpp"
#include "hkg/serialization.hpp"

namespace hkg {
namespace {

using nlohmann::json;

constexpr std::array<std::string_view, 4> kKindNames = {"corpus", "tuples", "hkg", "report"};

std::string read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kLoad, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_fully(int fd, std::string_view data, const std::filesystem::path& path) {
  while (!data.empty()) {
    ssize_t n = ::write(fd, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorKind::kStorage, "write failed for " + path.string() + ": " + std::strerror(errno));
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

template <class T>
T expect(Artifact artifact, ArtifactKind kind, const std::filesystem::path& path) {
  if (auto* v = std::get_if<T>(&artifact)) return std::move(*v);
  throw Error(ErrorKind::kValidation, path.string() + " does not hold a " +
                                          std::string(to_string(kind)) + " artifact");
}

}  // namespace

std::string_view to_string(ArtifactKind kind) { return kKindNames[static_cast<std::size_t>(kind)]; }

ArtifactKind parse_artifact_kind(std::string_view name) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == name) return static_cast<ArtifactKind>(i);
  }
  throw Error(ErrorKind::kValidation, "unknown artifact kind: " + std::string(name));
}

ArtifactEnvelope make_envelope(ArtifactKind kind, json payload) {
  ArtifactEnvelope env;
  env.kind = kind;
  env.content_hash = sha256_hex(canonical_dump(payload));
  env.payload = std::move(payload);
  return env;
}

std::string save_envelope(const ArtifactEnvelope& envelope, const std::filesystem::path& path) {
  const std::string payload_text = canonical_dump(envelope.payload);
  const std::string hash = sha256_hex(payload_text);
  // Keys already in sorted order: content_hash, format_version, kind, payload.
  std::string text = "{\"content_hash\":\"" + hash +
                     "\",\"format_version\":" + std::to_string(envelope.format_version) +
                     ",\"kind\":\"" + std::string(to_string(envelope.kind)) +
                     "\",\"payload\":" + payload_text + "}\n";

  const auto tmp = std::filesystem::path(path.string() + ".tmp." + std::to_string(::getpid()));
  int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  if (fd < 0) {
    throw Error(ErrorKind::kStorage, "cannot write " + path.string() + ": " + std::strerror(errno));
  }
  try {
    write_fully(fd, text, tmp);
    if (::fsync(fd) != 0) throw Error(ErrorKind::kStorage, "fsync failed for " + tmp.string());
  } catch (...) {
    ::close(fd);
    std::filesystem::remove(tmp);
    throw;
  }
  ::close(fd);
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error(ErrorKind::kStorage, "cannot move artifact into " + path.string() + ": " + ec.message());
  }
  return hash;
}

ArtifactEnvelope load_envelope(const std::filesystem::path& path) {
  const std::string raw = read_all(path);
  json j;
  try {
    j = json::parse(raw);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kCorruption, path.string() + " is not valid JSON: " + e.what());
  }
  if (!j.is_object() || !j.contains("format_version") || !j["format_version"].is_number_integer() ||
      !j.contains("kind") || !j["kind"].is_string() || !j.contains("payload") ||
      !j.contains("content_hash") || !j["content_hash"].is_string()) {
    throw Error(ErrorKind::kCorruption, path.string() + " is not an artifact envelope");
  }
  const int version = j["format_version"].get<int>();
  if (version != kFormatVersion) {
    throw Error(ErrorKind::kIncompatibleVersion,
                path.string() + " has format version " + std::to_string(version) +
                    " but this build reads version " + std::to_string(kFormatVersion));
  }
  ArtifactEnvelope env;
  env.format_version = version;
  env.kind = parse_artifact_kind(j["kind"].get<std::string>());
  env.payload = std::move(j["payload"]);
  env.content_hash = j["content_hash"].get<std::string>();
  if (sha256_hex(canonical_dump(env.payload)) != env.content_hash) {
    throw Error(ErrorKind::kCorruption, path.string() + ": content hash does not match payload");
  }
  return env;
}

ArtifactKind kind_of(const Artifact& artifact) {
  return static_cast<ArtifactKind>(artifact.index());
}

ArtifactEnvelope to_envelope(const Artifact& artifact) {
  json payload = std::visit(
      [](const auto& a) -> json {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, Corpus>) return corpus_to_json(a);
        else if constexpr (std::is_same_v<T, TupleSet>) return tuples_to_json(a);
        else if constexpr (std::is_same_v<T, Hkg>) return hkg_to_json(a);
        else return json(a);
      },
      artifact);
  return make_envelope(kind_of(artifact), std::move(payload));
}

Artifact from_envelope(const ArtifactEnvelope& env) {
  switch (env.kind) {
    case ArtifactKind::kCorpus: return corpus_from_json(env.payload);
    case ArtifactKind::kTuples: return tuples_from_json(env.payload);
    case ArtifactKind::kHkg: return hkg_from_json(env.payload);
    case ArtifactKind::kReport: return report_from_json(env.payload);
  }
  throw Error(ErrorKind::kValidation, "unknown artifact kind");
}

std::string save(const Artifact& artifact, const std::filesystem::path& path) {
  return save_envelope(to_envelope(artifact), path);
}

Artifact load(const std::filesystem::path& path) { return from_envelope(load_envelope(path)); }

Corpus load_corpus_artifact(const std::filesystem::path& path) {
  return expect<Corpus>(load(path), ArtifactKind::kCorpus, path);
}

TupleSet load_tuples_artifact(const std::filesystem::path& path) {
  return expect<TupleSet>(load(path), ArtifactKind::kTuples, path);
}

Hkg load_hkg_artifact(const std::filesystem::path& path) {
  return expect<Hkg>(load(path), ArtifactKind::kHkg, path);
}

QualityReport load_report_artifact(const std::filesystem::path& path) {
  return expect<QualityReport>(load(path), ArtifactKind::kReport, path);
}

std::string event_line(const InteractionEvent& event) {
  return "{\"session\":" + json(event.session).dump() + ",\"t_ms\":" + std::to_string(event.t_ms) +
         ",\"kind\":" + json(event.kind).dump() + ",\"payload\":" + canonical_dump(event.payload) +
         "}\n";
}

InteractionEvent parse_event_line(std::string_view line) {
  json j = json::parse(line);  // parse_error propagates to the caller
  if (!j.is_object() || !j.contains("session") || !j["session"].is_string() ||
      !j.contains("t_ms") || !j["t_ms"].is_number_integer() || !j.contains("kind") ||
      !j["kind"].is_string()) {
    throw Error(ErrorKind::kValidation, "event line lacks session, t_ms or kind");
  }
  InteractionEvent e;
  e.session = j["session"].get<std::string>();
  e.t_ms = j["t_ms"].get<std::int64_t>();
  e.kind = j["kind"].get<std::string>();
  e.payload = j.contains("payload") ? j["payload"] : json::object();
  return e;
}

std::vector<InteractionEvent> read_events(const std::filesystem::path& path, Warnings* warnings) {
  const std::string raw = read_all(path);
  std::vector<InteractionEvent> events;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < raw.size()) {
    std::size_t nl = raw.find('\n', pos);
    const bool last = nl == std::string::npos || nl + 1 >= raw.size();
    std::string_view line(raw.data() + pos, (nl == std::string::npos ? raw.size() : nl) - pos);
    pos = nl == std::string::npos ? raw.size() : nl + 1;
    ++line_no;
    if (line.empty()) continue;
    try {
      events.push_back(parse_event_line(line));
    } catch (const std::exception& e) {
      if (last && nl == std::string::npos) {
        if (warnings) {
          warnings->push_back(path.string() + ": dropping truncated final line " +
                              std::to_string(line_no));
        }
        break;
      }
      throw Error(ErrorKind::kCorruption,
                  path.string() + ": bad event on line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return events;
}

EventLog::EventLog(std::filesystem::path path, Warnings* warnings) : path_(std::move(path)) {
  if (!std::filesystem::exists(path_)) return;
  const std::string raw = read_all(path_);
  if (!raw.empty() && raw.back() != '\n') {
    const std::size_t keep = raw.rfind('\n') == std::string::npos ? 0 : raw.rfind('\n') + 1;
    std::filesystem::resize_file(path_, keep);
    if (warnings) warnings->push_back(path_.string() + ": trimmed truncated trailing line");
  }
  for (const auto& e : read_events(path_, warnings)) {
    auto [it, inserted] = last_t_.emplace(e.session, e.t_ms);
    if (!inserted) it->second = std::max(it->second, e.t_ms);
  }
}

void EventLog::append(const InteractionEvent& event) {
  auto it = last_t_.find(event.session);
  if (it != last_t_.end() && event.t_ms < it->second) {
    throw Error(ErrorKind::kRejected, "event at t_ms=" + std::to_string(event.t_ms) +
                                          " precedes t_ms=" + std::to_string(it->second) +
                                          " in session " + event.session);
  }
  const std::string line = event_line(event);
  int fd = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
  if (fd < 0) {
    throw Error(ErrorKind::kStorage, "cannot open event log " + path_.string() + ": " + std::strerror(errno));
  }
  try {
    write_fully(fd, line, path_);
    if (::fsync(fd) != 0) throw Error(ErrorKind::kStorage, "fsync failed for " + path_.string());
  } catch (...) {
    ::close(fd);
    throw;
  }
  ::close(fd);
  last_t_[event.session] = event.t_ms;
}

void append_event(const std::filesystem::path& log_path, const InteractionEvent& event) {
  EventLog(log_path).append(event);
}

}  // namespace hkg
