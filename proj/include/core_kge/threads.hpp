#pragma once

namespace core_kge {

/// Worker count for parallel regions. Reads CORE_KGE_THREADS on every call
/// (tests toggle it at runtime); falls back to the available hardware cores.
/// Always at least 1.
int worker_threads();

}  // namespace core_kge
