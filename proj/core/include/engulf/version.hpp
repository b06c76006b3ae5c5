#pragma once

#define ENGULF_VERSION "0.1.0"
