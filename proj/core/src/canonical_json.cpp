#include "hkg/canonical_json.hpp"

#include <cmath>
#include <cstdio>

#include <openssl/evp.h>

#include "hkg/error.hpp"

namespace hkg {
namespace {

void emit(const nlohmann::json& v, std::string& out) {
  using value_t = nlohmann::json::value_t;
  switch (v.type()) {
    case value_t::object: {
      // nlohmann::json objects are std::map-backed, so iteration is sorted.
      out += '{';
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += nlohmann::json(it.key()).dump();
        out += ':';
        emit(it.value(), out);
      }
      out += '}';
      break;
    }
    case value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        emit(v[i], out);
      }
      out += ']';
      break;
    }
    case value_t::number_float: {
      const double d = v.get<double>();
      if (!std::isfinite(d)) throw Error(ErrorKind::kValidation, "non-finite number in artifact");
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.6g", d);
      out += buf;
      break;
    }
    default:
      out += v.dump(-1, ' ', false, nlohmann::json::error_handler_t::strict);
  }
}

}  // namespace

std::string canonical_dump(const nlohmann::json& value) {
  std::string out;
  emit(value, out);
  return out;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorKind::kStorage, "sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

}  // namespace hkg
