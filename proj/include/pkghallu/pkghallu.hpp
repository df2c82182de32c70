#pragma once

#include "pkghallu/date.hpp"
#include "pkghallu/error.hpp"
#include "pkghallu/generation_store.hpp"
#include "pkghallu/guard.hpp"
#include "pkghallu/import_extract.hpp"
#include "pkghallu/language.hpp"
#include "pkghallu/model_profile.hpp"
#include "pkghallu/pipeline.hpp"
#include "pkghallu/probe_runner.hpp"
#include "pkghallu/prompt_factory.hpp"
#include "pkghallu/published_fixture.hpp"
#include "pkghallu/registry_catalog.hpp"
#include "pkghallu/registry_fetch.hpp"
#include "pkghallu/report.hpp"
#include "pkghallu/run_config.hpp"
#include "pkghallu/statistics.hpp"
#include "pkghallu/verdict_metrics.hpp"
