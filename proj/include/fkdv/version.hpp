#pragma once

namespace fkdv {

inline constexpr const char* kVersion = "0.1.0";

#ifdef FKDV_GIT_REVISION
inline constexpr const char* kGitRevision = FKDV_GIT_REVISION;
#else
inline constexpr const char* kGitRevision = "unknown";
#endif

} // namespace fkdv
