// placeholder translation unit; implementation follows
