#pragma once

// Umbrella header for the analytics library (no HTTP, no CLI).

#include "tdledger/awareness.hpp"
#include "tdledger/codec.hpp"
#include "tdledger/config.hpp"
#include "tdledger/core.hpp"
#include "tdledger/datasets.hpp"
#include "tdledger/ingest.hpp"
#include "tdledger/monitor.hpp"
#include "tdledger/prioritize.hpp"
#include "tdledger/store.hpp"
