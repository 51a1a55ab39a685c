#pragma once

#include <cstdint>

#include "toolkg/catalog.hpp"
#include "toolkg/providers.hpp"
#include "toolkg/querygen.hpp"

namespace toolkg {

// Enterprise catalog over procurement, sales, finance, HR and service
// objects. Tools on the same object, its parent or the objects it refers to
// share identifier parameters; which verbs exist per object depends on the
// seed.
Catalog make_synthetic_catalog(std::uint64_t seed = kDefaultSeed);

// Query generation settings for the bundled benchmark.
QueryGenConfig synthetic_benchmark_config(std::uint64_t seed = kDefaultSeed);

}  // namespace toolkg
