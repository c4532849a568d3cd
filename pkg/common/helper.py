def load_data(serializer, data, context=None):
    """
    Validate ``data`` with ``serializer`` and build the domain object it describes.

    Args:
        serializer (Serializer): The serializer class to use.
        data (dict): The JSON document.
        context (dict, optional): Extra data for the serializer, e.g. the
            spaces a function document refers to. Defaults to None.

    Returns:
        object: Whatever the serializer's ``create`` builds.

    Raises:
        ValidationError: If the document is invalid.
    """
    data_serializer = serializer(data=data, context=context or {})
    data_serializer.is_valid(raise_exception=True)
    return data_serializer.save()
