#pragma once

#include "latred/errors.hpp"
#include "latred/numerics.hpp"
#include "latred/basis.hpp"
#include "latred/qr.hpp"
#include "latred/profile.hpp"
#include "latred/lll.hpp"
#include "latred/enumeration.hpp"
#include "latred/bkz.hpp"
#include "latred/latgen.hpp"
#include "latred/io.hpp"
#include "latred/verify.hpp"
#include "latred/bench.hpp"
