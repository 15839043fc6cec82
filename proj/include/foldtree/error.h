#ifndef FOLDTREE_ERROR_H_
#define FOLDTREE_ERROR_H_

#include <stdexcept>
#include <string>

namespace foldtree {

// Broad failure category. The CLI maps these onto process exit codes.
enum class ErrorKind { kUsage, kData, kIo };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error UsageError(const std::string& what) {
  return Error(ErrorKind::kUsage, what);
}
inline Error DataError(const std::string& what) {
  return Error(ErrorKind::kData, what);
}
inline Error IoError(const std::string& what) {
  return Error(ErrorKind::kIo, what);
}

}  // namespace foldtree

#endif  // FOLDTREE_ERROR_H_
