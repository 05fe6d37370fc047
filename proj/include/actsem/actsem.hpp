#pragma once

#include <actsem/clause.hpp>
#include <actsem/error.hpp>
#include <actsem/induction.hpp>
#include <actsem/manifest.hpp>
#include <actsem/relations.hpp>
#include <actsem/simulator.hpp>
#include <actsem/theory_io.hpp>
#include <actsem/trace.hpp>
#include <actsem/types.hpp>
#include <actsem/version.hpp>
