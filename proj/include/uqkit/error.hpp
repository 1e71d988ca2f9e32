#pragma once

#include <stdexcept>
#include <string>

namespace uqkit {

enum class ErrorCode {
  kInvalidArgument,  // caller violated a precondition
  kData,             // input data is inconsistent (dimension mismatch, empty store)
  kIo,               // file could not be opened, read or written
  kFormat,           // file contents are not a valid UQDS stream
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool condition, const char* message,
                    ErrorCode code = ErrorCode::kInvalidArgument) {
  if (!condition) throw Error(code, message);
}

}  // namespace uqkit
