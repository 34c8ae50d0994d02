#pragma once

namespace medmark {

// Worker count used by the OpenMP kernels. 0 means "auto" (the OpenMP
// default). All kernels produce bit-identical results for any thread count:
// parallel regions only write disjoint slots and every floating-point
// reduction runs serially in a fixed order.
void set_threads(int n);
int effective_threads();

}  // namespace medmark
