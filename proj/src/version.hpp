#pragma once

#define TMEKIT_VERSION_STRING "0.1.0"
