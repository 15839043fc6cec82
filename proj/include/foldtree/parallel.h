#ifndef FOLDTREE_PARALLEL_H_
#define FOLDTREE_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace foldtree {

// Worker cap: FOLDTREE_THREADS if set to a positive integer, otherwise the
// hardware concurrency (at least 1).
int max_threads();

// Runs body(i) for i in [0, n). Iterations must be independent; each writes
// only to its own output slot, so results do not depend on scheduling.
// Exceptions thrown by a body are rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace foldtree

#endif  // FOLDTREE_PARALLEL_H_
