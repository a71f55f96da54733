#pragma once

// Umbrella header for the provmark provenance toolkit.

#include "provmark/crc32.hpp"
#include "provmark/device.hpp"
#include "provmark/digest.hpp"
#include "provmark/dwt.hpp"
#include "provmark/errors.hpp"
#include "provmark/frame.hpp"
#include "provmark/fuzzy.hpp"
#include "provmark/hex.hpp"
#include "provmark/image.hpp"
#include "provmark/lcr.hpp"
#include "provmark/metrics.hpp"
#include "provmark/pipeline.hpp"
#include "provmark/png_io.hpp"
#include "provmark/qim.hpp"
#include "provmark/registry.hpp"
#include "provmark/rng.hpp"
#include "provmark/service.hpp"
#include "provmark/signature.hpp"
#include "provmark/watermark.hpp"
