/* C interface between generated wrappers and the measurement runtime.
 *
 * Region ids are dense from 0 in registration order. Registering the same
 * (name, file, line) triple again returns the same id. Every enter must be
 * matched by an exit of the same region on the same thread.
 *
 * Environment understood by the runtime:
 *   LIBWRAP_PROFILE_OUT  output path; "%p" expands to the process id
 *                        (default: libwrap_profile.<pid>.json)
 *   LIBWRAP_VERBOSE      print a banner at startup and shutdown
 */
#ifndef LIBWRAP_MONITOR_H
#define LIBWRAP_MONITOR_H

#ifdef __cplusplus
extern "C" {
#endif

int libwrap_region_register(const char *name, const char *file, int line);
void libwrap_enter(int region);
void libwrap_exit(int region);
void libwrap_flush(void);

#ifdef __cplusplus
}
#endif

#endif /* LIBWRAP_MONITOR_H */
