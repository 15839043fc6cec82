#ifndef FOLDTREE_SERIALIZE_H_
#define FOLDTREE_SERIALIZE_H_

#include <iosfwd>
#include <string>

#include "foldtree/tree.h"

namespace foldtree {

inline constexpr const char* kModelFormat = "foldtree-model";
inline constexpr int kModelVersion = 1;

// JSON model document. Reals are written with round-trip precision and
// non-finite values as the strings "inf", "-inf" and "nan", so a loaded model
// predicts bit-identically. Training row ids are not stored.
std::string model_to_json(const TreeModel& tree);

// Throws DataError on a wrong format tag, a version mismatch or a malformed
// document.
TreeModel model_from_json(const std::string& text);

// File wrappers. Throw IoError when the file cannot be opened or written.
void save_model(const TreeModel& tree, const std::string& path);
TreeModel load_model(const std::string& path);

}  // namespace foldtree

#endif  // FOLDTREE_SERIALIZE_H_
