# Error budget module
